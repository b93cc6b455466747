#pragma once

#include <cstdint>
#include <optional>

#include "subray/optics/modes.hpp"
#include "subray/optics/psf.hpp"
#include "subray/scene/scene.hpp"

namespace subray {

struct TwoStageResult {
  double centroid_estimate = 0.0;
  double separation_estimate = 0.0;
  std::uint64_t stage1_photons = 0;
  std::uint64_t stage2_photons = 0;
};

/// Two-stage budget-split protocol for a pair with unknown centroid:
/// stage 1 spends f*N photons on direct imaging and estimates the centroid
/// by the sample mean; stage 2 aligns an HG SPADE to that estimate, spends
/// the remaining photons, and inverts the odd-mode count. The default
/// f = 0.5 is the fixed equal split that is optimal deep below the
/// diffraction scale. Supplying a known centroid skips stage 1 and gives the
/// whole budget to the aligned SPADE.
TwoStageResult two_stage_adaptive(const TwoPointScene& scene, const Psf& psf,
                                  const ModeBasis& basis,
                                  std::uint64_t n_photons, double split_fraction,
                                  std::uint64_t seed,
                                  std::optional<double> known_centroid = {});

}  // namespace subray
