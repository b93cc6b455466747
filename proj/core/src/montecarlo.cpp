#include "subray/estimate/montecarlo.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "subray/math/parallel.hpp"
#include "subray/math/rng.hpp"

namespace subray {

MCResult monte_carlo_mse(const PmfFamily& family, const Estimator& estimator,
                         const std::vector<double>& theta_grid,
                         std::uint64_t n_photons, std::uint64_t trials,
                         std::uint64_t seed, BudgetMode budget,
                         const std::string& receiver_label) {
  if (theta_grid.empty() || trials == 0 || n_photons == 0)
    throw std::invalid_argument("empty grid or zero trials/photons");

  MCResult out;
  out.theta = theta_grid;
  out.trials = trials;
  out.n_photons = n_photons;
  out.receiver = receiver_label;
  out.seed = seed;

  for (size_t gi = 0; gi < theta_grid.size(); ++gi) {
    const double theta = theta_grid[gi];
    const OutcomePMF pmf = family(theta);
    const std::vector<double> params = pmf.default_params;

    const std::uint64_t block = 1024;
    const std::uint64_t n_blocks = (trials + block - 1) / block;
    struct Acc {
      double sum = 0.0, sum2 = 0.0, sum_err2 = 0.0, sum_err4 = 0.0;
    };
    std::vector<Acc> accs(n_blocks);

    parallel_blocks(trials, block, [&](std::uint64_t b, std::uint64_t begin,
                                       std::uint64_t end) {
      Acc acc;
      for (std::uint64_t t = begin; t < end; ++t) {
        const std::uint64_t trial_seed =
            derive_stream_seed(seed ^ (0x5bd1e995ULL * (gi + 1)), t);
        const DetectionRecord rec =
            sample_record(pmf, params, n_photons, budget, trial_seed);
        const double est = estimator(rec);
        const double err = est - theta;
        acc.sum += est;
        acc.sum2 += est * est;
        acc.sum_err2 += err * err;
        acc.sum_err4 += err * err * err * err;
      }
      accs[b] = acc;
    });

    Acc total;
    for (const auto& a : accs) {
      total.sum += a.sum;
      total.sum2 += a.sum2;
      total.sum_err2 += a.sum_err2;
      total.sum_err4 += a.sum_err4;
    }
    const double t = static_cast<double>(trials);
    const double mean = total.sum / t;
    const double mse = total.sum_err2 / t;
    const double bias = mean - theta;
    const double variance = total.sum2 / t - mean * mean;
    out.mse.push_back(mse);
    out.bias.push_back(bias);
    out.variance.push_back(variance);
    const double m4 = total.sum_err4 / t;
    out.mse_stderr.push_back(std::sqrt(std::max(m4 - mse * mse, 0.0) / t));
  }
  return out;
}

std::string MCResult::to_delimited() const {
  std::ostringstream out;
  out.precision(9);
  out << std::scientific;
  out << "theta,mse,bias,variance,trials,N,receiver,seed\n";
  for (size_t i = 0; i < theta.size(); ++i) {
    out << theta[i] << "," << mse[i] << "," << bias[i] << "," << variance[i]
        << "," << trials << "," << n_photons << "," << receiver << "," << seed
        << "\n";
  }
  return out.str();
}

BiasCurve empirical_bias(const MCResult& mc) {
  BiasCurve curve;
  curve.theta = mc.theta;
  curve.bias = mc.bias;
  const size_t n = mc.theta.size();
  curve.derivative.assign(n, 0.0);
  if (n < 2) return curve;
  for (size_t i = 0; i < n; ++i) {
    if (i == 0) {
      curve.derivative[i] =
          (mc.bias[1] - mc.bias[0]) / (mc.theta[1] - mc.theta[0]);
    } else if (i + 1 == n) {
      curve.derivative[i] =
          (mc.bias[n - 1] - mc.bias[n - 2]) / (mc.theta[n - 1] - mc.theta[n - 2]);
    } else {
      curve.derivative[i] =
          (mc.bias[i + 1] - mc.bias[i - 1]) / (mc.theta[i + 1] - mc.theta[i - 1]);
    }
  }
  return curve;
}

}  // namespace subray
