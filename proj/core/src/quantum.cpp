#include "subray/info/quantum.hpp"

#include <cmath>
#include <stdexcept>

namespace subray {

MixtureStateModel MixtureStateModel::localization(const Psf& psf) {
  return {psf, [](double theta) {
            return std::vector<WeightedDisplacement>{{1.0, theta}};
          }};
}

MixtureStateModel MixtureStateModel::separation_pair(const Psf& psf) {
  return {psf, [](double theta) {
            return std::vector<WeightedDisplacement>{{0.5, -0.5 * theta},
                                                     {0.5, +0.5 * theta}};
          }};
}

MixtureStateModel MixtureStateModel::dim_companion(const Psf& psf, double b) {
  if (b < 0.0 || b > 1.0)
    throw std::invalid_argument("relative brightness must lie in [0, 1]");
  return {psf, [b](double theta) {
            return std::vector<WeightedDisplacement>{{1.0 - b, 0.0},
                                                     {b, theta}};
          }};
}

double mixture_fidelity(const MixtureStateModel& model, double theta1,
                        double theta2) {
  const auto c1 = model.components(theta1);
  const auto c2 = model.components(theta2);
  const auto r1 = static_cast<Eigen::Index>(c1.size());
  const auto r2 = static_cast<Eigen::Index>(c2.size());

  // Nonzero spectrum of rho1 rho2 equals that of W^{1/2} C V C^T W^{1/2},
  // where C_ij = <psi_{d_i} | psi_{e_j}> are PSF overlaps.
  Eigen::MatrixXd c(r1, r2);
  for (Eigen::Index i = 0; i < r1; ++i)
    for (Eigen::Index j = 0; j < r2; ++j)
      c(i, j) = model.psf.overlap(c1[i].displacement, c2[j].displacement);

  Eigen::VectorXd sqrt_w(r1), v(r2);
  for (Eigen::Index i = 0; i < r1; ++i) sqrt_w[i] = std::sqrt(c1[i].weight);
  for (Eigen::Index j = 0; j < r2; ++j) v[j] = c2[j].weight;

  const Eigen::MatrixXd m = sqrt_w.asDiagonal() * c * v.asDiagonal() *
                            c.transpose() * sqrt_w.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  double root_sum = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
    root_sum += std::sqrt(std::max(eig.eigenvalues()[i], 0.0));
  return root_sum * root_sum;
}

double coherent_fidelity(const CoherentPairStateModel& model, double theta1,
                         double theta2) {
  // int |alpha(x|t1) - alpha(x|t2)|^2 dx expanded in PSF overlaps.
  const auto& psf = model.psf;
  const std::complex<double> a1 = model.amp1, a2 = model.amp2;
  const double n1 = std::norm(a1), n2 = std::norm(a2);
  const double cross = 2.0 * (a1 * std::conj(a2)).real();

  auto self_energy = [&](double theta) {
    return n1 + n2 + cross * psf.overlap(-0.5 * theta, +0.5 * theta);
  };
  // <alpha(t1)|alpha(t2)> expanded over the four displaced-PSF pairs.
  const double g11 = psf.overlap(-0.5 * theta1, -0.5 * theta2);
  const double g22 = psf.overlap(+0.5 * theta1, +0.5 * theta2);
  const double g12 = psf.overlap(-0.5 * theta1, +0.5 * theta2);
  const double g21 = psf.overlap(+0.5 * theta1, -0.5 * theta2);
  const double inner = n1 * g11 + n2 * g22 +
                       (a1 * std::conj(a2)).real() * (g12 + g21);
  const double distance2 = self_energy(theta1) + self_energy(theta2) -
                           2.0 * inner;
  return std::exp(-std::max(distance2, 0.0));
}

double qfi_from_fidelity(const std::function<double(double, double)>& fidelity,
                         double theta0, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
  auto curvature = [&](double h) {
    const double fp = fidelity(theta0, theta0 + h);
    const double fm = fidelity(theta0, theta0 - h);
    // F(theta0, theta0) = 1 by construction.
    return (fp - 2.0 + fm) / (h * h);
  };
  const double d_h = curvature(step);
  const double d_h2 = curvature(0.5 * step);
  const double second = (4.0 * d_h2 - d_h) / 3.0;
  // Curvature buried in rounding noise means the step is too small.
  const double scale = std::abs(fidelity(theta0, theta0 + step) - 1.0);
  if (scale < 64.0 * std::numeric_limits<double>::epsilon())
    throw std::runtime_error(
        "fidelity step too small: curvature below rounding noise; "
        "increase the step");
  return -2.0 * second;
}

double qfi_from_fidelity(const MixtureStateModel& model, double theta0,
                         double step) {
  return qfi_from_fidelity(
      [&](double a, double b) { return mixture_fidelity(model, a, b); },
      theta0, step);
}

double qfi_from_fidelity(const CoherentPairStateModel& model, double theta0,
                         double step) {
  return qfi_from_fidelity(
      [&](double a, double b) { return coherent_fidelity(model, a, b); },
      theta0, step);
}

double kappa(const Psf& psf, double theta) {
  const double dk2 = psf.delta_k() * psf.delta_k();
  return psf.derivative_overlap(0.5 * theta, -0.5 * theta) / dk2;
}

double qfi_partial_coherence_bound(std::complex<double> gamma, double theta,
                                   const Psf& psf, double n_photons) {
  if (std::abs(gamma) > 1.0 + 1e-12)
    throw std::invalid_argument("|gamma| must be <= 1");
  const double dk2 = psf.delta_k() * psf.delta_k();
  return n_photons * dk2 * (1.0 - (gamma * kappa(psf, theta)).real());
}

Eigen::Matrix3d qcrb_3d(double delta_k, double wavenumber, double n_photons) {
  if (!(delta_k > 0.0) || !(n_photons > 0.0))
    throw std::invalid_argument("delta_k and N must be > 0");
  Eigen::Matrix3d out = Eigen::Matrix3d::Zero();
  const double dk2 = delta_k * delta_k;
  out(0, 0) = 1.0 / dk2;
  out(1, 1) = 1.0 / dk2;
  out(2, 2) = wavenumber * wavenumber / (dk2 * dk2);
  return out / n_photons;
}

}  // namespace subray
