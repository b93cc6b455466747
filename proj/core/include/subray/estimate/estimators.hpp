#pragma once

#include <functional>
#include <vector>

#include "subray/measure/sampling.hpp"

namespace subray {

enum class EstimatorKind {
  kSpadeClosedForm,
  kDirectMleNumeric,
  kGenericMleNumeric,
  kSampleMeanCentroid
};

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::kGenericMleNumeric;
  double lower = 0.0;
  double upper = 12.0;      // defaulted to 6/delta_k by callers
  double tolerance = 1e-7;
};

/// Closed-form separation estimate from an aligned HG SPADE record:
/// theta_hat = (2/delta_k) sqrt(n_odd / N), with n_odd the total count in
/// odd mode indices. Returns 0 on zero counts (the biased zero-return
/// estimator).
double spade_mle_separation(const DetectionRecord& record, double delta_k);

struct MleResult {
  double value = 0.0;
  bool degenerate = false;  // flat likelihood; value pinned to the lower bound
};

/// Single-parameter maximum-likelihood estimate over params[index] by
/// golden-section on the record log-likelihood. Deterministic given the
/// record.
MleResult numeric_mle(const DetectionRecord& record, const OutcomePMF& family,
                      const EstimatorSpec& spec, int param_index = 0);

/// Sample mean of continuous positions.
double sample_mean_position(const DetectionRecord& record);

/// Record log-likelihood under the family law at the given parameters.
double log_likelihood(const DetectionRecord& record, const OutcomePMF& family,
                      const std::vector<double>& params);

}  // namespace subray
