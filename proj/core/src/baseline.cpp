#include "subray/moments/baseline.hpp"

#include <cmath>
#include <vector>

namespace subray {

IntensityGrid diffraction_baseline(const IntensityGrid& grid, const Psf& psf) {
  grid.validate();
  const double pitch = grid.pixel_pitch;
  // Kernel radius: where the intensity response has decayed away.
  const double radius = psf.kind() == PsfKind::kGaussian
                            ? 6.0 * psf.width_param()
                            : psf.domain_halfwidth();
  const int kr = std::max(1, static_cast<int>(std::ceil(radius / pitch)));

  // Separable intensity kernel |psi(x)|^2 |psi(y)|^2, unit-normalized so the
  // convolution preserves total intensity on the padded grid.
  std::vector<double> kernel(2 * kr + 1);
  double ksum = 0.0;
  for (int k = -kr; k <= kr; ++k) {
    const double v = psf(k * pitch);
    kernel[k + kr] = v * v;
    ksum += kernel[k + kr];
  }
  for (auto& v : kernel) v /= ksum;

  IntensityGrid out;
  out.width = grid.width + 2 * kr;
  out.height = grid.height + 2 * kr;
  out.pixel_pitch = pitch;
  out.x0 = grid.x0 - kr * pitch;
  out.y0 = grid.y0 - kr * pitch;
  out.values.assign(static_cast<size_t>(out.width) * out.height, 0.0);

  // x pass into a padded intermediate, then y pass.
  std::vector<double> tmp(static_cast<size_t>(out.width) * grid.height, 0.0);
  for (int j = 0; j < grid.height; ++j)
    for (int i = 0; i < grid.width; ++i) {
      const double v = grid.at(i, j);
      if (v == 0.0) continue;
      for (int k = -kr; k <= kr; ++k)
        tmp[j * out.width + (i + kr + k)] += v * kernel[k + kr];
    }
  for (int j = 0; j < grid.height; ++j)
    for (int i = 0; i < out.width; ++i) {
      const double v = tmp[j * out.width + i];
      if (v == 0.0) continue;
      for (int k = -kr; k <= kr; ++k)
        out.values[(j + kr + k) * out.width + i] += v * kernel[k + kr];
    }
  return out;
}

}  // namespace subray
