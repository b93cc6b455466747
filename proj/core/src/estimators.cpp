#include "subray/estimate/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace subray {

double spade_mle_separation(const DetectionRecord& record, double delta_k) {
  if (!(delta_k > 0.0)) throw std::invalid_argument("delta_k must be > 0");
  if (record.counts.size() < 2)
    throw std::invalid_argument("record lacks mode counts");
  // counts layout: modes 0..M then bucket; bucket parity is unknown and its
  // occupancy is negligible for the regimes this estimator serves.
  std::uint64_t n_odd = 0;
  for (size_t i = 1; i + 1 < record.counts.size(); i += 2)
    n_odd += record.counts[i];
  if (n_odd == 0) return 0.0;
  const double n = static_cast<double>(record.photons_emitted);
  return (2.0 / delta_k) * std::sqrt(static_cast<double>(n_odd) / n);
}

double sample_mean_position(const DetectionRecord& record) {
  if (record.positions.empty())
    throw std::invalid_argument("record has no position samples");
  double sum = 0.0;
  for (double x : record.positions) sum += x;
  return sum / static_cast<double>(record.positions.size());
}

double log_likelihood(const DetectionRecord& record, const OutcomePMF& family,
                      const std::vector<double>& params) {
  if (family.support == Support::kContinuous1d) {
    double ll = 0.0;
    for (double x : record.positions) {
      const double p = family.density(x, params);
      if (p <= 0.0) return -std::numeric_limits<double>::infinity();
      ll += std::log(p);
    }
    return ll;
  }
  const auto p = family.probabilities(params);
  if (p.size() != record.counts.size())
    throw std::invalid_argument("record/law outcome count mismatch");
  double ll = 0.0;
  for (size_t k = 0; k < p.size(); ++k) {
    if (record.counts[k] == 0) continue;
    if (p[k] <= 0.0) return -std::numeric_limits<double>::infinity();
    ll += static_cast<double>(record.counts[k]) * std::log(p[k]);
  }
  if (family.lossy) {
    double detected = 0.0;
    for (double v : p) detected += v;
    const double miss = std::max(0.0, 1.0 - detected);
    if (record.discarded > 0) {
      if (miss <= 0.0) return -std::numeric_limits<double>::infinity();
      ll += static_cast<double>(record.discarded) * std::log(miss);
    }
  }
  return ll;
}

MleResult numeric_mle(const DetectionRecord& record, const OutcomePMF& family,
                      const EstimatorSpec& spec, int param_index) {
  if (!(spec.upper > spec.lower))
    throw std::invalid_argument("invalid search bounds");
  if (!(spec.tolerance > 0.0))
    throw std::invalid_argument("tolerance must be > 0");

  std::vector<double> params = family.default_params;
  if (params.size() <= static_cast<size_t>(param_index))
    params.resize(param_index + 1, 0.0);
  auto objective = [&](double v) {
    params[param_index] = v;
    return log_likelihood(record, family, params);
  };

  constexpr double kGolden = 0.6180339887498949;
  double a = spec.lower, b = spec.upper;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  double best_seen = std::max(f1, f2), worst_seen = std::min(f1, f2);
  while (b - a > spec.tolerance) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = objective(x2);
    }
    best_seen = std::max(best_seen, std::max(f1, f2));
    worst_seen = std::min(worst_seen, std::min(f1, f2));
  }

  MleResult out;
  const double mid = 0.5 * (a + b);
  // Compare against the boundary values; a boundary maximum is legitimate.
  const double f_lo = objective(spec.lower);
  const double f_mid = objective(mid);
  const double f_hi = objective(spec.upper);
  out.value = mid;
  double f_best = f_mid;
  if (f_lo > f_best) {
    out.value = spec.lower;
    f_best = f_lo;
  }
  if (f_hi > f_best) {
    out.value = spec.upper;
    f_best = f_hi;
  }
  if (!std::isfinite(f_best) ||
      (std::abs(best_seen - worst_seen) < 1e-14 &&
       std::abs(f_best - worst_seen) < 1e-14)) {
    out.degenerate = true;
    out.value = spec.lower;
  }
  return out;
}

}  // namespace subray
