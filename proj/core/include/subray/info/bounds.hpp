#pragma once

#include <optional>
#include <string>
#include <vector>

namespace subray {

/// Bias-corrected Cramer-Rao bound for a scalar parameter:
/// MSE(theta) >= (1 + db/dtheta)^2 / (N I) + b^2.
double bias_corrected_crb(double bias, double bias_derivative,
                          double fisher_information, double n_photons,
                          double theta);

/// Bayesian lower bound 1 / (N E_q(I) + J) with prior information J.
double van_trees_bound(double prior_info, double mean_fisher_information,
                       double n_photons);

/// Modified information theta^2 I(theta), the information on the relative
/// error (theta_hat - theta) / theta. Undefined at theta = 0.
double modified_fi_relative(double fisher_information, double theta);

/// Per-theta bound table with provenance, exportable as delimited text with
/// columns (theta, crb_direct, crb_receiver, qcrb, bias_corrected,
/// van_trees). Missing entries print as "nan"; diverging ones as "inf".
struct BoundReport {
  std::vector<double> theta;
  std::vector<double> crb_direct;
  std::vector<double> crb_receiver;
  std::vector<double> qcrb;
  std::vector<double> bias_corrected;
  std::vector<double> van_trees;
  double n_photons = 1.0;
  std::vector<std::string> provenance;

  std::string to_delimited() const;
};

}  // namespace subray
