#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "subray/measure/sampling.hpp"

namespace subray {

/// Monte Carlo error summary over a separation grid. The accumulators keep
/// mse = bias^2 + variance an exact identity at every grid point.
struct MCResult {
  std::vector<double> theta;
  std::vector<double> mse;
  std::vector<double> bias;
  std::vector<double> variance;
  std::vector<double> mse_stderr;
  std::uint64_t trials = 0;
  std::uint64_t n_photons = 0;
  std::string receiver;
  std::uint64_t seed = 0;

  std::string to_delimited() const;
};

/// Builds the law for a separation value. The centroid and any receiver
/// geometry are captured by the factory.
using PmfFamily = std::function<OutcomePMF(double theta)>;
/// Maps a record to a separation estimate.
using Estimator = std::function<double(const DetectionRecord&)>;

/// Per-theta empirical MSE/bias/variance of the estimator, trial-parallel
/// with per-block derived seeds; results are independent of thread count.
MCResult monte_carlo_mse(const PmfFamily& family, const Estimator& estimator,
                         const std::vector<double>& theta_grid,
                         std::uint64_t n_photons, std::uint64_t trials,
                         std::uint64_t seed,
                         BudgetMode budget = BudgetMode::kFixedN,
                         const std::string& receiver_label = "receiver");

struct BiasCurve {
  std::vector<double> theta;
  std::vector<double> bias;
  std::vector<double> derivative;  // central differences, one-sided at ends
};

/// Empirical bias and its finite-difference derivative, ready to feed the
/// bias-corrected bound.
BiasCurve empirical_bias(const MCResult& mc);

}  // namespace subray
