#include "subray/hypothesis/chernoff.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "subray/math/quadrature.hpp"

namespace subray {

namespace {

constexpr double kGolden = 0.6180339887498949;

std::vector<double> law_with_discard(const OutcomePMF& pmf) {
  auto p = pmf.probabilities(pmf.default_params);
  if (pmf.lossy) {
    double detected = 0.0;
    for (double v : p) detected += v;
    p.push_back(std::max(0.0, 1.0 - detected));
  }
  return p;
}

// sum p1^s p2^{1-s} with boundary support conventions.
double q_of_s_discrete(const std::vector<double>& p1,
                       const std::vector<double>& p2, double s) {
  double q = 0.0;
  for (size_t k = 0; k < p1.size(); ++k) {
    if (p1[k] <= 0.0 && p2[k] <= 0.0) continue;
    if (p1[k] <= 0.0) {
      if (s == 0.0) q += p2[k];
      continue;
    }
    if (p2[k] <= 0.0) {
      if (s == 1.0) q += p1[k];
      continue;
    }
    q += std::exp(s * std::log(p1[k]) + (1.0 - s) * std::log(p2[k]));
  }
  return q;
}

ExponentReport minimize_q(const std::function<double(double)>& q_of_s,
                          const std::string& method) {
  ExponentReport report;
  report.method = method;

  double a = 0.0, b = 1.0;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = q_of_s(x1), f2 = q_of_s(x2);
  while (b - a > 1e-6) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = q_of_s(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = q_of_s(x2);
    }
  }
  double s_star = 0.5 * (a + b);
  double q_min = q_of_s(s_star);
  // Boundary minima are legitimate (one-sided support differences).
  const double q0 = q_of_s(0.0), q1 = q_of_s(1.0);
  if (q0 < q_min) {
    q_min = q0;
    s_star = 0.0;
  }
  if (q1 < q_min) {
    q_min = q1;
    s_star = 1.0;
  }
  report.s_star = s_star;
  if (q_min <= 0.0) {
    report.disjoint_support = true;
    report.exponent = std::numeric_limits<double>::infinity();
  } else {
    report.exponent = -std::log(std::min(q_min, 1.0));
    if (report.exponent < 0.0 && report.exponent > -1e-12)
      report.exponent = 0.0;
  }
  return report;
}

}  // namespace

ExponentReport chernoff_exponent(const std::vector<double>& p1,
                                 const std::vector<double>& p2) {
  if (p1.size() != p2.size())
    throw std::invalid_argument("hypothesis laws need a common outcome space");
  return minimize_q(
      [&](double s) { return q_of_s_discrete(p1, p2, s); },
      "golden-section on discrete outcomes");
}

ExponentReport chernoff_exponent(const OutcomePMF& p1, const OutcomePMF& p2) {
  if (p1.support != p2.support)
    throw std::invalid_argument("hypothesis laws need a common support type");
  if (p1.support == Support::kDiscrete) {
    return chernoff_exponent(law_with_discard(p1), law_with_discard(p2));
  }
  const double half = std::max(p1.domain_halfwidth(p1.default_params),
                               p2.domain_halfwidth(p2.default_params));
  auto q_of_s = [&](double s) {
    return integrate(
               [&](double x) {
                 const double d1 = p1.density(x, p1.default_params);
                 const double d2 = p2.density(x, p2.default_params);
                 if (d1 <= 0.0 && d2 <= 0.0) return 0.0;
                 if (d1 <= 0.0) return s == 0.0 ? d2 : 0.0;
                 if (d2 <= 0.0) return s == 1.0 ? d1 : 0.0;
                 return std::exp(s * std::log(d1) + (1.0 - s) * std::log(d2));
               },
               -half, half, 1e-10, 1e-9, 20000)
        .value;
  };
  return minimize_q(q_of_s, "golden-section on quadrature grid");
}

ExponentReport qce_pure_vs_mixture(const Psf& psf, double pure_displacement,
                                   const std::vector<WeightedDisplacement>& h2) {
  double overlap_sum = 0.0;
  for (const auto& c : h2) {
    const double g = psf.overlap(pure_displacement, c.displacement);
    overlap_sum += c.weight * g * g;
  }
  ExponentReport report;
  report.method = "pure-state overlap";
  report.s_star = 0.0;
  if (overlap_sum <= 0.0) {
    report.disjoint_support = true;
    report.exponent = std::numeric_limits<double>::infinity();
  } else {
    report.exponent = -std::log(std::min(overlap_sum, 1.0));
  }
  return report;
}

double relative_entropy(const std::vector<double>& p1,
                        const std::vector<double>& p2, bool* infinite) {
  if (p1.size() != p2.size())
    throw std::invalid_argument("distributions need a common outcome space");
  if (infinite) *infinite = false;
  double d = 0.0;
  for (size_t k = 0; k < p1.size(); ++k) {
    if (p1[k] <= 0.0) continue;
    if (p2[k] <= 0.0) {
      if (infinite) *infinite = true;
      return std::numeric_limits<double>::infinity();
    }
    d += p1[k] * std::log(p1[k] / p2[k]);
  }
  return std::max(d, 0.0);
}

double relative_entropy(const OutcomePMF& p1, const OutcomePMF& p2,
                        bool* infinite) {
  if (p1.support != p2.support)
    throw std::invalid_argument("distributions need a common support type");
  if (infinite) *infinite = false;
  if (p1.support == Support::kDiscrete)
    return relative_entropy(law_with_discard(p1), law_with_discard(p2),
                            infinite);
  const double half = std::max(p1.domain_halfwidth(p1.default_params),
                               p2.domain_halfwidth(p2.default_params));
  bool violation = false;
  const double d =
      integrate(
          [&](double x) {
            const double d1 = p1.density(x, p1.default_params);
            if (d1 <= 0.0) return 0.0;
            const double d2 = p2.density(x, p2.default_params);
            if (d2 <= 0.0) {
              violation = true;
              return 0.0;
            }
            return d1 * std::log(d1 / d2);
          },
          -half, half, 1e-10, 1e-9, 20000)
          .value;
  if (violation) {
    if (infinite) *infinite = true;
    return std::numeric_limits<double>::infinity();
  }
  return std::max(d, 0.0);
}

ExoplanetRelativeEntropies exoplanet_relative_entropies(double b, double theta,
                                                        double delta_k) {
  if (b <= 0.0 || b >= 1.0)
    throw std::invalid_argument("relative brightness must lie in (0, 1)");
  const double u2 = theta * theta * delta_k * delta_k;
  ExoplanetRelativeEntropies out;
  out.quantum = (1.0 - std::exp(-u2 / 16.0)) * b;
  out.direct = 0.5 * (std::exp(u2 / 4.0) - 1.0) * b * b;
  out.leading_order = true;
  return out;
}

double m_ary_qce(const std::vector<std::vector<double>>& pairwise) {
  const size_t m = pairwise.size();
  if (m < 2) throw std::invalid_argument("need at least two hypotheses");
  double min_xi = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < m; ++i) {
    if (pairwise[i].size() != m)
      throw std::invalid_argument("pairwise matrix must be square");
    if (pairwise[i][i] != 0.0)
      throw std::invalid_argument("pairwise diagonal must be zero");
    for (size_t j = 0; j < m; ++j) {
      if (std::abs(pairwise[i][j] - pairwise[j][i]) > 1e-12)
        throw std::invalid_argument("pairwise matrix must be symmetric");
      if (i != j) min_xi = std::min(min_xi, pairwise[i][j]);
    }
  }
  return min_xi;
}

double qce_second_moment_leading(const IntensityGrid& a, const IntensityGrid& b,
                                 double delta_k) {
  const auto ma = second_moments_about_origin(a);
  const auto mb = second_moments_about_origin(b);
  return delta_k * delta_k *
         (std::abs(ma.first - mb.first) + std::abs(ma.second - mb.second));
}

}  // namespace subray
