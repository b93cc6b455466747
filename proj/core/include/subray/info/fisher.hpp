#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "subray/measure/pmf.hpp"

namespace subray {

struct FisherMatrix {
  std::vector<std::string> param_names;
  Eigen::MatrixXd matrix;
  bool per_photon = true;
  bool degenerate = false;  // rank deficiency detected; inverse is pseudo

  /// Inverse, falling back to the Moore-Penrose pseudo-inverse (and setting
  /// degenerate) when the matrix is rank-deficient.
  Eigen::MatrixXd inverse() const;
};

struct FisherDiagnostics {
  bool singular_support = false;  // zero probability with nonzero derivative
  double leakage = 0.0;
};

/// Per-photon Fisher information for the parameter params[index] by central
/// differences of log-probabilities with one Richardson step. Continuous
/// supports are integrated adaptively, skipping zero-density regions.
double fisher_information(const OutcomePMF& pmf,
                          const std::vector<double>& params, int index,
                          double step, FisherDiagnostics* diag = nullptr);

/// Single-parameter convenience: derivative in the separation (params[0]).
double fisher_scalar(const OutcomePMF& pmf, double theta0, double step,
                     FisherDiagnostics* diag = nullptr);

FisherMatrix fisher_matrix(const OutcomePMF& pmf,
                           const std::vector<double>& params,
                           const std::vector<double>& steps,
                           const std::vector<std::string>& names = {});

}  // namespace subray
