#include "subray/info/fisher.hpp"

#include <cmath>
#include <stdexcept>

#include "subray/math/quadrature.hpp"

namespace subray {

namespace {

constexpr double kTinyProb = 1e-300;

std::vector<double> perturbed(const std::vector<double>& params, int index,
                              double delta) {
  std::vector<double> out = params;
  out.at(index) += delta;
  return out;
}

// Central-difference derivative with one Richardson extrapolation step:
// combines h and h/2 estimates to cancel the O(h^2) term.
struct ProbDerivatives {
  std::vector<double> value;
  std::vector<double> derivative;
};

ProbDerivatives discrete_derivatives(const OutcomePMF& pmf,
                                     const std::vector<double>& params,
                                     int index, double h) {
  auto with_discard = [&](const std::vector<double>& p) {
    std::vector<double> full = p;
    if (pmf.lossy) {
      double detected = 0.0;
      for (double v : p) detected += v;
      full.push_back(std::max(0.0, 1.0 - detected));
    }
    return full;
  };
  const auto p0 = with_discard(pmf.probabilities(params));
  const auto pp = with_discard(pmf.probabilities(perturbed(params, index, h)));
  const auto pm = with_discard(pmf.probabilities(perturbed(params, index, -h)));
  const auto pp2 =
      with_discard(pmf.probabilities(perturbed(params, index, 0.5 * h)));
  const auto pm2 =
      with_discard(pmf.probabilities(perturbed(params, index, -0.5 * h)));

  ProbDerivatives out;
  out.value = p0;
  out.derivative.resize(p0.size());
  for (size_t k = 0; k < p0.size(); ++k) {
    const double d_h = (pp[k] - pm[k]) / (2.0 * h);
    const double d_h2 = (pp2[k] - pm2[k]) / h;
    out.derivative[k] = (4.0 * d_h2 - d_h) / 3.0;
  }
  return out;
}

}  // namespace

Eigen::MatrixXd FisherMatrix::inverse() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix);
  const auto& values = eig.eigenvalues();
  const double threshold =
      std::max(values.cwiseAbs().maxCoeff(), 1.0) * 1e-12;
  Eigen::VectorXd inv_values(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i)
    inv_values[i] = std::abs(values[i]) > threshold ? 1.0 / values[i] : 0.0;
  return eig.eigenvectors() * inv_values.asDiagonal() *
         eig.eigenvectors().transpose();
}

double fisher_information(const OutcomePMF& pmf,
                          const std::vector<double>& params, int index,
                          double step, FisherDiagnostics* diag) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");

  if (pmf.support == Support::kDiscrete) {
    const auto d = discrete_derivatives(pmf, params, index, step);
    double info = 0.0;
    for (size_t k = 0; k < d.value.size(); ++k) {
      if (d.value[k] < kTinyProb) {
        // Zero-probability outcomes carry no information unless the law
        // moves off zero, which signals a singular statistical model.
        if (std::abs(d.derivative[k]) > 1e-9 && diag)
          diag->singular_support = true;
        continue;
      }
      info += d.derivative[k] * d.derivative[k] / d.value[k];
    }
    if (!std::isfinite(info))
      throw std::runtime_error("non-finite Fisher information");
    return info;
  }

  // Continuous support: integrate (dp/dtheta)^2 / p over the domain.
  const double half = pmf.domain_halfwidth
                          ? pmf.domain_halfwidth(params)
                          : 1.0 / step;
  bool singular = false;
  auto integrand = [&](double x) {
    const double p0 = pmf.density(x, params);
    const double pp = pmf.density(x, perturbed(params, index, step));
    const double pm = pmf.density(x, perturbed(params, index, -step));
    const double pp2 = pmf.density(x, perturbed(params, index, 0.5 * step));
    const double pm2 = pmf.density(x, perturbed(params, index, -0.5 * step));
    const double d_h = (pp - pm) / (2.0 * step);
    const double d_h2 = (pp2 - pm2) / step;
    const double dp = (4.0 * d_h2 - d_h) / 3.0;
    if (p0 < kTinyProb) {
      if (std::abs(dp) > 1e-9) singular = true;
      return 0.0;
    }
    return dp * dp / p0;
  };
  const auto result =
      integrate(integrand, -half, half, 1e-10, 1e-9, 40000, 192);
  if (diag && singular) diag->singular_support = true;
  if (!std::isfinite(result.value))
    throw std::runtime_error("non-finite Fisher information integral");
  return result.value;
}

double fisher_scalar(const OutcomePMF& pmf, double theta0, double step,
                     FisherDiagnostics* diag) {
  std::vector<double> params = pmf.default_params;
  if (params.empty()) params = {theta0};
  params[0] = theta0;
  return fisher_information(pmf, params, 0, step, diag);
}

FisherMatrix fisher_matrix(const OutcomePMF& pmf,
                           const std::vector<double>& params,
                           const std::vector<double>& steps,
                           const std::vector<std::string>& names) {
  const int n = static_cast<int>(params.size());
  if (steps.size() != params.size())
    throw std::invalid_argument("one step per parameter required");

  FisherMatrix out;
  out.param_names = names;
  if (out.param_names.empty())
    for (int i = 0; i < n; ++i) out.param_names.push_back("p" + std::to_string(i));
  out.matrix = Eigen::MatrixXd::Zero(n, n);

  if (pmf.support == Support::kDiscrete) {
    std::vector<ProbDerivatives> derivs;
    derivs.reserve(n);
    for (int i = 0; i < n; ++i)
      derivs.push_back(discrete_derivatives(pmf, params, i, steps[i]));
    const auto& p0 = derivs[0].value;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double sum = 0.0;
        for (size_t k = 0; k < p0.size(); ++k) {
          if (p0[k] < kTinyProb) continue;
          sum += derivs[i].derivative[k] * derivs[j].derivative[k] / p0[k];
        }
        out.matrix(i, j) = out.matrix(j, i) = sum;
      }
  } else {
    const double half = pmf.domain_halfwidth(params);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        auto integrand = [&](double x) {
          const double p0 = pmf.density(x, params);
          if (p0 < kTinyProb) return 0.0;
          auto dpd = [&](int idx) {
            const double h = steps[idx];
            const double pp = pmf.density(x, perturbed(params, idx, h));
            const double pm = pmf.density(x, perturbed(params, idx, -h));
            const double pp2 = pmf.density(x, perturbed(params, idx, 0.5 * h));
            const double pm2 = pmf.density(x, perturbed(params, idx, -0.5 * h));
            return (4.0 * ((pp2 - pm2) / h) - (pp - pm) / (2.0 * h)) / 3.0;
          };
          return dpd(i) * dpd(j) / p0;
        };
        out.matrix(i, j) = out.matrix(j, i) =
            integrate(integrand, -half, half, 1e-10, 1e-9, 40000, 192).value;
      }
  }

  if (!out.matrix.allFinite())
    throw std::runtime_error("non-finite Fisher matrix entries");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.matrix);
  const double max_eig = eig.eigenvalues().cwiseAbs().maxCoeff();
  out.degenerate = eig.eigenvalues().minCoeff() <= std::max(max_eig, 1.0) * 1e-10;
  return out;
}

}  // namespace subray
