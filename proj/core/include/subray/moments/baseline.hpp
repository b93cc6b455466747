#pragma once

#include "subray/optics/psf.hpp"
#include "subray/scene/scene.hpp"

namespace subray {

/// Diffraction-limited comparison image: the object intensity convolved with
/// |psi|^2 on an enlarged grid (padded by the PSF support), kernel
/// normalized so the total intensity is preserved.
IntensityGrid diffraction_baseline(const IntensityGrid& grid, const Psf& psf);

}  // namespace subray
