#include "subray/optics/modes.hpp"

#include <cmath>
#include <stdexcept>

#include "subray/math/quadrature.hpp"
#include "subray/math/special.hpp"

namespace subray {

double hg_mode(int n, double scale, double x) {
  if (n < 0) throw std::invalid_argument("mode index must be >= 0");
  if (!(scale > 0.0)) throw std::invalid_argument("mode scale must be > 0");
  const double u = x / (scale * std::sqrt(2.0));
  const double envelope =
      std::pow(2.0 * kPi * scale * scale, -0.25) * std::exp(-0.5 * u * u);
  // normalized Hermite recurrence h_n = H_n / sqrt(2^n n!)
  double hm = 0.0, h = 1.0;
  for (int k = 0; k < n; ++k) {
    const double next =
        u * std::sqrt(2.0 / (k + 1.0)) * h - std::sqrt(k / (k + 1.0)) * hm;
    hm = h;
    h = next;
  }
  return h * envelope;
}

namespace {

bool matched_gaussian(const Psf& psf, const ModeBasis& basis) {
  return psf.kind() == PsfKind::kGaussian &&
         std::abs(basis.scale - psf.width_param()) <=
             1e-12 * psf.width_param();
}

// Coherent-state amplitudes for the matched Gaussian/HG pair:
// a_n(d) = e^{-alpha^2/2} alpha^n / sqrt(n!), alpha = d * delta_k.
double matched_amplitude(double alpha, int n) {
  if (n == 0) return std::exp(-0.5 * alpha * alpha);
  const double log_mag = -0.5 * alpha * alpha +
                         n * std::log(std::abs(alpha)) -
                         0.5 * log_factorial(n);
  double a = std::exp(log_mag);
  if (alpha < 0.0 && (n % 2 == 1)) a = -a;
  return a;
}

}  // namespace

double displaced_amplitude(const Psf& psf, const ModeBasis& basis, int n,
                           double d) {
  if (matched_gaussian(psf, basis)) {
    const double alpha = d * psf.delta_k();
    if (alpha == 0.0) return n == 0 ? 1.0 : 0.0;
    return matched_amplitude(alpha, n);
  }
  const double half = psf.domain_halfwidth(std::abs(d)) +
                      (std::sqrt(2.0 * n + 1.0) + 6.0) * basis.scale;
  return integrate(
             [&](double x) { return hg_mode(n, basis.scale, x) * psf(x - d); },
             -half, half, 1e-11)
      .value;
}

OverlapTable make_overlap_table(const Psf& psf, const ModeBasis& basis,
                                const std::vector<double>& displacements) {
  OverlapTable table;
  table.basis = basis;
  table.displacements = displacements;
  table.amplitudes.assign(basis.cutoff + 1,
                          std::vector<double>(displacements.size(), 0.0));
  table.leakage.assign(displacements.size(), 0.0);
  for (size_t j = 0; j < displacements.size(); ++j) {
    double captured = 0.0;
    for (int n = 0; n <= basis.cutoff; ++n) {
      const double a = displaced_amplitude(psf, basis, n, displacements[j]);
      table.amplitudes[n][j] = a;
      captured += a * a;
    }
    table.leakage[j] = std::max(0.0, 1.0 - captured);
  }
  return table;
}

std::vector<double> displaced_mode_probabilities(const Psf& psf,
                                                 const ModeBasis& basis,
                                                 double d) {
  if (psf.kind() == PsfKind::kGaussian &&
      basis.kind == BasisKind::kHermiteGaussian &&
      std::abs(basis.scale - psf.width_param()) > 1e-9 * psf.width_param()) {
    throw std::invalid_argument(
        "HG basis scale does not match the Gaussian PSF sigma");
  }
  std::vector<double> p(basis.cutoff + 2, 0.0);
  double captured = 0.0;
  for (int n = 0; n <= basis.cutoff; ++n) {
    const double a = displaced_amplitude(psf, basis, n, d);
    p[n] = a * a;
    captured += p[n];
  }
  p[basis.cutoff + 1] = std::max(0.0, 1.0 - captured);  // leakage bucket
  return p;
}

std::vector<double> interleaved_mode_probabilities(const Psf& psf,
                                                   const ModeBasis& basis,
                                                   double d) {
  std::vector<double> amp(basis.cutoff + 1);
  for (int n = 0; n <= basis.cutoff; ++n)
    amp[n] = displaced_amplitude(psf, basis, n, d);

  std::vector<double> p;
  double captured = 0.0;
  int n = 0;
  if (basis.interleave_offset == 1) {
    p.push_back(amp[0] * amp[0]);
    captured += p.back();
    n = 1;
  }
  for (; n + 1 <= basis.cutoff; n += 2) {
    const double plus = 0.5 * (amp[n] + amp[n + 1]) * (amp[n] + amp[n + 1]);
    const double minus = 0.5 * (amp[n] - amp[n + 1]) * (amp[n] - amp[n + 1]);
    p.push_back(plus);
    p.push_back(minus);
    captured += plus + minus;
  }
  if (n <= basis.cutoff) {  // unpaired trailing index
    p.push_back(amp[n] * amp[n]);
    captured += p.back();
  }
  p.push_back(std::max(0.0, 1.0 - captured));
  return p;
}

}  // namespace subray
