#pragma once

#include <cmath>
#include <cstdint>

namespace subray {

/// Physicists' Hermite polynomial H_n(x) by upward recurrence.
inline double hermite(int n, double x) {
  if (n == 0) return 1.0;
  if (n == 1) return 2.0 * x;
  double hm = 1.0, h = 2.0 * x;
  for (int k = 2; k <= n; ++k) {
    const double next = 2.0 * x * h - 2.0 * (k - 1) * hm;
    hm = h;
    h = next;
  }
  return h;
}

inline double log_factorial(int n) { return std::lgamma(n + 1.0); }

/// Poisson pmf e^{-mean} mean^n / n!, computed in log space.
inline double poisson_pmf(int n, double mean) {
  if (mean <= 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(mean) - mean - log_factorial(n));
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace subray
