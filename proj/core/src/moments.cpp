#include "subray/moments/moments.hpp"

#include <cmath>
#include <stdexcept>

#include "subray/math/special.hpp"

namespace subray {

namespace {

// e^{-q/2} q^{m/2} / sqrt(m!) with q = (x dk)^2, sign carried by x^m.
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

// e^{-q} q^m / m!, q = (x dk)^2: the intensity (Poisson) kernel.
double intensity_kernel(double x, int m, double delta_k) {
  const double q = x * delta_k * x * delta_k;
  return poisson_pmf(m, q);
}

}  // namespace

double coherent_moment(const FieldGrid& field, int m, int n, double delta_k) {
  if (m < 0 || n < 0) throw std::invalid_argument("moment orders must be >= 0");
  double sum = 0.0;
  for (int j = 0; j < field.height; ++j)
    for (int i = 0; i < field.width; ++i)
      sum += field.at(i, j) * amplitude_kernel(field.x_of(i), m, delta_k) *
             amplitude_kernel(field.y_of(j), n, delta_k);
  return sum;
}

double incoherent_moment(const IntensityGrid& grid, int m, int n,
                         double delta_k) {
  if (m < 0 || n < 0) throw std::invalid_argument("moment orders must be >= 0");
  grid.validate();
  double sum = 0.0;
  for (int j = 0; j < grid.height; ++j)
    for (int i = 0; i < grid.width; ++i)
      sum += grid.at(i, j) * intensity_kernel(grid.x_of(i), m, delta_k) *
             intensity_kernel(grid.y_of(j), n, delta_k);
  return sum;
}

double interleaved_odd_moment(const Constellation& scene, int n,
                              double delta_k) {
  scene.validate();
  double sum = 0.0;
  for (const auto& c : mixture_components(scene))
    sum += c.weight * 2.0 * amplitude_kernel(c.displacement, n, delta_k) *
           amplitude_kernel(c.displacement, n + 1, delta_k);
  return sum;
}

const MomentEstimate* MomentSet::find(int m, int n, MomentParity parity) const {
  for (const auto& e : entries)
    if (e.m == m && e.n == n && e.parity == parity) return &e;
  return nullptr;
}

MomentSet estimate_moments(const DetectionRecord& record, int cutoff) {
  const int modes = cutoff + 1;
  if (record.counts.size() != static_cast<size_t>(modes) * modes + 1)
    throw std::invalid_argument("record does not match the 2D mode layout");
  const double n_total = static_cast<double>(record.photons_emitted);
  MomentSet set;
  for (int m = 0; m < modes; ++m)
    for (int n = 0; n < modes; ++n) {
      const double counts =
          static_cast<double>(record.counts[m * modes + n]);
      MomentEstimate e;
      e.m = m;
      e.n = n;
      e.parity = MomentParity::kEven;
      e.value = counts / n_total;
      // Rule-of-succession floor keeps the error finite for empty cells.
      const double p_err = (counts + 1.0) / (n_total + 2.0);
      e.std_error = std::sqrt(p_err * (1.0 - p_err) / n_total);
      set.entries.push_back(e);
    }
  return set;
}

void add_interleaved_moments(MomentSet& set, const DetectionRecord& record,
                             const ModeBasis& basis) {
  const double n_total = static_cast<double>(record.photons_emitted);
  // outcome layout produced by interleaved_pmf: optional hg0, then
  // (pair n +, pair n -) for n = offset, offset+2, ..., optional trailing
  // unpaired mode, bucket.
  size_t idx = 0;
  if (basis.interleave_offset == 1) ++idx;
  for (int n = basis.interleave_offset; n + 1 <= basis.cutoff; n += 2) {
    if (idx + 1 >= record.counts.size())
      throw std::invalid_argument("record does not match interleaved layout");
    const double plus = static_cast<double>(record.counts[idx]);
    const double minus = static_cast<double>(record.counts[idx + 1]);
    idx += 2;
    MomentEstimate e;
    e.m = n;
    e.n = 0;
    e.parity = MomentParity::kOdd;
    e.value = (plus - minus) / n_total;
    const double p_sum = (plus + minus + 1.0) / (n_total + 2.0);
    e.std_error =
        std::sqrt(std::max(p_sum - e.value * e.value, 0.0) / n_total);
    set.entries.push_back(e);
  }
  set.interleaved_available = true;
}

}  // namespace subray
