#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subray/measure/pmf.hpp"
#include "subray/scene/scene.hpp"

namespace subray {

/// Asymptotic error-decay exponent of a binary test, P_e = exp(-xi N + o(N)).
struct ExponentReport {
  double exponent = 0.0;
  double s_star = 0.5;                 // minimizing s in [0, 1]
  bool disjoint_support = false;       // xi = +inf
  bool leading_order = false;          // value is a small-parameter expansion
  std::string method;
};

/// Chernoff exponent -log min_s sum p1^s p2^{1-s} (integral for continuous
/// supports), minimized by golden-section to |ds| <= 1e-6. The objective is
/// log-convex in s, so the interior minimum is unique; boundary values use
/// the support conventions Q(0) = P2(supp p1), Q(1) = P1(supp p2).
ExponentReport chernoff_exponent(const OutcomePMF& p1, const OutcomePMF& p2);
ExponentReport chernoff_exponent(const std::vector<double>& p1,
                                 const std::vector<double>& p2);

/// Quantum Chernoff exponent for a pure state |psi_{d0}> against a
/// displaced-PSF mixture: xi_Q = -log sum_k w_k |<psi_{d0}|psi_{e_k}>|^2.
ExponentReport qce_pure_vs_mixture(const Psf& psf, double pure_displacement,
                                   const std::vector<WeightedDisplacement>& h2);

/// Classical relative entropy D(p1 || p2) = sum p1 log(p1/p2); +inf on
/// absolute-continuity violation (reported via disjoint_support).
double relative_entropy(const std::vector<double>& p1,
                        const std::vector<double>& p2,
                        bool* infinite = nullptr);
double relative_entropy(const OutcomePMF& p1, const OutcomePMF& p2,
                        bool* infinite = nullptr);

/// Leading-order star+companion discrimination rates for a Gaussian PSF,
/// evaluated from the closed forms at relative brightness b:
///   quantum: (1 - exp(-theta^2 dk^2 / 16)) b
///   direct:  (exp(theta^2 dk^2 / 4) - 1) b^2 / 2
/// The O(b^2) / O(b^3) remainders are dropped (leading_order flag).
struct ExoplanetRelativeEntropies {
  double quantum = 0.0;
  double direct = 0.0;
  bool leading_order = true;
};
ExoplanetRelativeEntropies exoplanet_relative_entropies(double b, double theta,
                                                        double delta_k);

/// M-ary quantum Chernoff exponent: the hardest pair dominates,
/// xi = min_{i != j} xi_{(i,j)}.
double m_ary_qce(const std::vector<std::vector<double>>& pairwise);

/// Leading-order pairwise QCE between two intensity grids sharing a frame,
/// from origin-referenced second moments: dk^2 (|dm_x| + |dm_y|).
double qce_second_moment_leading(const IntensityGrid& a, const IntensityGrid& b,
                                 double delta_k);

}  // namespace subray
