#include "subray/estimate/adaptive.hpp"

#include <cmath>
#include <stdexcept>

#include "subray/estimate/estimators.hpp"
#include "subray/math/rng.hpp"
#include "subray/measure/pmf.hpp"
#include "subray/measure/sampling.hpp"

namespace subray {

TwoStageResult two_stage_adaptive(const TwoPointScene& scene, const Psf& psf,
                                  const ModeBasis& basis,
                                  std::uint64_t n_photons, double split_fraction,
                                  std::uint64_t seed,
                                  std::optional<double> known_centroid) {
  if (!(split_fraction > 0.0 && split_fraction < 1.0) && !known_centroid)
    throw std::invalid_argument("split fraction must lie in (0, 1)");
  if (n_photons == 0) throw std::invalid_argument("photon budget must be > 0");

  TwoStageResult out;
  double centroid_estimate;
  std::uint64_t stage2_budget;

  if (known_centroid) {
    centroid_estimate = *known_centroid;
    stage2_budget = n_photons;
  } else {
    const auto stage1_budget = static_cast<std::uint64_t>(
        std::llround(split_fraction * static_cast<double>(n_photons)));
    if (stage1_budget == 0 || stage1_budget >= n_photons)
      throw std::invalid_argument("split starves one of the stages");
    stage2_budget = n_photons - stage1_budget;

    const OutcomePMF direct = direct_pdf(scene, psf);
    const DetectionRecord stage1 =
        sample_record(direct, direct.default_params, stage1_budget,
                      BudgetMode::kFixedN, derive_stream_seed(seed, 1));
    centroid_estimate = sample_mean_position(stage1);
    out.stage1_photons = stage1_budget;
  }

  // Stage 2: SPADE axis at the centroid estimate; any residual offset enters
  // the law as a static misalignment.
  const OutcomePMF spade = spade_pmf(scene, psf, basis,
                                     centroid_estimate - scene.centroid);
  const DetectionRecord stage2 =
      sample_record(spade, spade.default_params, stage2_budget,
                    BudgetMode::kFixedN, derive_stream_seed(seed, 2));
  out.stage2_photons = stage2_budget;
  out.centroid_estimate = centroid_estimate;
  out.separation_estimate = spade_mle_separation(stage2, psf.delta_k());
  return out;
}

}  // namespace subray
