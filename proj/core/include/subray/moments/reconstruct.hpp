#pragma once

#include "subray/moments/moments.hpp"
#include "subray/scene/scene.hpp"

namespace subray {

struct SupportRectangle {
  double x_min = -0.5;
  double x_max = 0.5;
  double y_min = -0.5;
  double y_max = 0.5;
};

struct ReconstructionResult {
  IntensityGrid estimate;     // non-negative, unit sum on the support
  double residual_norm = 0.0; // ||A i - p|| over the fitted moments
  double lambda = 0.0;
  bool infeasible = false;    // constraints could not be met; best fit kept
};

/// Non-negative least-squares fit of grid intensities to the measured moment
/// constraints, with a second-difference smoothness penalty. The declared
/// finite support is the caller's prior; moments outside max_order are
/// ignored.
ReconstructionResult reconstruct(const MomentSet& moments, double delta_k,
                                 const SupportRectangle& support,
                                 int resolution, double lambda = 1e-3,
                                 int max_order = 8);

}  // namespace subray
