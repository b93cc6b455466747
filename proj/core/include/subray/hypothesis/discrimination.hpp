#pragma once

#include <cstdint>
#include <vector>

#include "subray/measure/pmf.hpp"

namespace subray {

struct HypothesisPair {
  OutcomePMF p1;
  OutcomePMF p2;
  double prior1 = 0.5;
  double prior2 = 0.5;
};

struct DiscriminationResult {
  std::vector<std::uint64_t> photon_numbers;
  std::vector<double> error_rates;        // averaged over both hypotheses
  std::vector<std::uint64_t> error_counts;
  std::uint64_t trials_per_n = 0;
  double fitted_exponent = 0.0;
  double fitted_stderr = 0.0;
  bool exponent_is_lower_bound = false;   // zero errors at the largest N
  bool fit_valid = false;
};

/// Monte Carlo binary discrimination with the exact likelihood-ratio rule
/// (ties toward H1). Each trial draws one hypothesis from the priors, a
/// fixed-N photon record from its law, and decides by the sign of the
/// log-likelihood ratio. The exponent is fitted by error-count-weighted
/// linear regression of -log P_e against N over the cells with at least one
/// observed error; zero errors at the largest N flags the fit as a lower
/// bound.
DiscriminationResult simulate_discrimination(
    const HypothesisPair& pair, const std::vector<std::uint64_t>& photon_numbers,
    std::uint64_t trials, std::uint64_t seed);

}  // namespace subray
