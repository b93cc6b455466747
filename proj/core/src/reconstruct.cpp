#include "subray/moments/reconstruct.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "subray/math/special.hpp"

namespace subray {

namespace {

double amplitude_kernel(double x, int m, double delta_k) {
  const double u = x * delta_k;
  if (m == 0) return std::exp(-0.5 * u * u);
  if (u == 0.0) return 0.0;
  const double log_mag =
      -0.5 * u * u + m * std::log(std::abs(u)) - 0.5 * log_factorial(m);
  double a = std::exp(log_mag);
  if (u < 0.0 && (m % 2 == 1)) a = -a;
  return a;
}

double intensity_kernel(double x, int m, double delta_k) {
  const double q = x * delta_k * x * delta_k;
  return poisson_pmf(m, q);
}

}  // namespace

ReconstructionResult reconstruct(const MomentSet& moments, double delta_k,
                                 const SupportRectangle& support,
                                 int resolution, double lambda, int max_order) {
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
  if (!(support.x_max > support.x_min) || !(support.y_max > support.y_min))
    throw std::invalid_argument("empty support rectangle");

  const int rx = resolution;
  const int ry = resolution;
  const int cells = rx * ry;
  const double px = (support.x_max - support.x_min) / rx;
  const double py = (support.y_max - support.y_min) / ry;
  if (std::abs(px - py) > 1e-12 * px)
    throw std::invalid_argument(
        "support must be square (single pixel pitch on the output grid)");

  std::vector<const MomentEstimate*> used;
  for (const auto& e : moments.entries)
    if (e.m + e.n <= max_order) used.push_back(&e);
  if (used.empty()) throw std::invalid_argument("no usable moment entries");
  const int rows = static_cast<int>(used.size());

  // Forward model: each measured kernel is a linear functional of the cell
  // masses. Weight rows by the inverse standard error when available.
  Eigen::MatrixXd a(rows, cells);
  Eigen::VectorXd p(rows), w(rows);
  double p_scale = 0.0;
  for (const auto* e : used) p_scale = std::max(p_scale, std::abs(e->value));
  if (p_scale == 0.0) p_scale = 1.0;
  for (int r = 0; r < rows; ++r) {
    const auto& e = *used[r];
    p[r] = e.value;
    w[r] = 1.0 / std::max(e.std_error, 1e-6 * p_scale);
  }
  // Relative weighting only: the largest weight is 1, so lambda trades off
  // against a unit-scale data term.
  w /= w.maxCoeff();
  for (int r = 0; r < rows; ++r) {
    const auto& e = *used[r];
    for (int j = 0; j < ry; ++j)
      for (int i = 0; i < rx; ++i) {
        const double x = support.x_min + (i + 0.5) * px;
        const double y = support.y_min + (j + 0.5) * py;
        double k;
        if (e.parity == MomentParity::kEven) {
          k = intensity_kernel(x, e.m, delta_k) *
              intensity_kernel(y, e.n, delta_k);
        } else {
          // x-direction interleaved pair (m, m+1) at fundamental y mode
          k = 2.0 * amplitude_kernel(x, e.m, delta_k) *
              amplitude_kernel(x, e.m + 1, delta_k) *
              intensity_kernel(y, 0, delta_k);
        }
        a(r, j * rx + i) = k;
      }
  }

  // Second-difference smoothness penalty along both axes.
  const int dx_rows = ry * std::max(rx - 2, 0);
  const int dy_rows = rx * std::max(ry - 2, 0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dx_rows + dy_rows, cells);
  int row = 0;
  for (int j = 0; j < ry; ++j)
    for (int i = 1; i + 1 < rx; ++i, ++row) {
      d(row, j * rx + i - 1) = 1.0;
      d(row, j * rx + i) = -2.0;
      d(row, j * rx + i + 1) = 1.0;
    }
  for (int i = 0; i < rx; ++i)
    for (int j = 1; j + 1 < ry; ++j, ++row) {
      d(row, (j - 1) * rx + i) = 1.0;
      d(row, j * rx + i) = -2.0;
      d(row, (j + 1) * rx + i) = 1.0;
    }

  const Eigen::MatrixXd wa = w.asDiagonal() * a;
  const Eigen::VectorXd wp = w.cwiseProduct(p);
  const Eigen::MatrixXd g =
      wa.transpose() * wa + lambda * (d.transpose() * d);
  const Eigen::VectorXd b = wa.transpose() * wp;

  // Lipschitz constant by power iteration.
  Eigen::VectorXd v = Eigen::VectorXd::Ones(cells).normalized();
  double lipschitz = 1.0;
  for (int it = 0; it < 60; ++it) {
    v = (g * v).eval();
    lipschitz = v.norm();
    if (lipschitz <= 0.0) break;
    v /= lipschitz;
  }
  if (!(lipschitz > 0.0)) lipschitz = 1.0;
  const double step = 1.0 / lipschitz;

  // FISTA with projection onto the non-negative orthant.
  Eigen::VectorXd x_cur = Eigen::VectorXd::Constant(cells, 1.0 / cells);
  Eigen::VectorXd y_cur = x_cur;
  double t_cur = 1.0;
  for (int it = 0; it < 4000; ++it) {
    const Eigen::VectorXd grad = g * y_cur - b;
    Eigen::VectorXd x_next = (y_cur - step * grad).cwiseMax(0.0);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_cur * t_cur));
    const Eigen::VectorXd y_next =
        x_next + ((t_cur - 1.0) / t_next) * (x_next - x_cur);
    const double delta = (x_next - x_cur).norm();
    x_cur = x_next;
    y_cur = y_next;
    t_cur = t_next;
    if (delta < 1e-12 * std::max(1.0, x_cur.norm())) break;
  }

  ReconstructionResult out;
  out.lambda = lambda;
  out.residual_norm = (a * x_cur - p).norm();
  double worst_sigma = 0.0;
  for (int r = 0; r < rows; ++r) {
    const double sigma = std::max(used[r]->std_error, 1e-6 * p_scale);
    worst_sigma =
        std::max(worst_sigma, std::abs((a.row(r) * x_cur)(0) - p[r]) / sigma);
  }
  out.infeasible = worst_sigma > 5.0;

  IntensityGrid grid;
  grid.width = rx;
  grid.height = ry;
  grid.pixel_pitch = px;
  grid.x0 = support.x_min + 0.5 * px;
  grid.y0 = support.y_min + 0.5 * py;
  grid.values.assign(x_cur.data(), x_cur.data() + cells);
  grid.normalize();
  out.estimate = grid;
  return out;
}

}  // namespace subray
