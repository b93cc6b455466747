#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace subray {

/// Raised when an adaptive integral fails to reach the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double best, double err)
      : std::runtime_error(what), best_estimate(best), error_estimate(err) {}
  double best_estimate;
  double error_estimate;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;      // estimated absolute error
  int subdivisions = 0;
};

/// Adaptive Gauss-Kronrod (G7,K15) integration of f over [a, b].
/// Splits the worst interval until the summed error estimate drops below
/// max(abs_tol, rel_tol*|I|) or the subdivision budget is exhausted.
/// seed_segments sets the initial uniform partition; features narrower than
/// (b-a)/(8*seed_segments) can escape the refinement entirely, so callers
/// integrating spiky functions should seed accordingly.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double abs_tol = 1e-10,
                           double rel_tol = 1e-12, int max_subdivisions = 2000,
                           int seed_segments = 8);

/// As integrate(), but throws QuadratureError on non-convergence.
double integrate_checked(const std::function<double(double)>& f, double a,
                         double b, double abs_tol = 1e-10,
                         double rel_tol = 1e-12, int max_subdivisions = 2000,
                         int seed_segments = 8);

}  // namespace subray
