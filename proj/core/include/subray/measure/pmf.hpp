#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "subray/optics/modes.hpp"
#include "subray/optics/psf.hpp"
#include "subray/scene/scene.hpp"

namespace subray {

enum class ReceiverKind { kDirect, kSpade, kBspade, kSliver, kSplice, kTrispade };

/// Measurement-side configuration. alignment_offset is the receiver axis
/// position minus the true scene centroid; the axis is frozen at
/// construction, so parameter sweeps move the scene, not the receiver.
struct Receiver {
  ReceiverKind kind = ReceiverKind::kSpade;
  ModeBasis basis;
  double alignment_offset = 0.0;
  int bspade_target = 0;
  std::optional<Eigen::MatrixXd> crosstalk;

  std::string label() const;
};

enum class Support { kContinuous1d, kDiscrete };

/// Outcome probability law as a function of scene parameters.
///
/// Parameter vector convention for incoherent scenes: params[0] = separation,
/// params[1] = centroid. Coherent pairs use params[0] = separation only.
///
/// Discrete laws return one probability per retained outcome; when lossy is
/// set the probabilities sum to detected_fraction(params) < 1 and the
/// remainder is an observable no-click channel under a fixed photon budget.
/// Laws flagged poissonian_channels report mean counts per emitted photon
/// (independent Poisson channels); their sum may exceed 1 when source
/// interference is constructive.
struct OutcomePMF {
  Support support = Support::kDiscrete;
  std::vector<std::string> outcome_labels;
  std::function<std::vector<double>(const std::vector<double>&)> probabilities;
  std::function<double(double, const std::vector<double>&)> density;
  std::function<double(const std::vector<double>&)> detected_fraction;
  /// Half-width of the numerically relevant domain for continuous laws.
  std::function<double(const std::vector<double>&)> domain_halfwidth;
  /// Draws one image-plane position (continuous laws).
  std::function<double(const std::vector<double>&, class Xoshiro256&)> sampler;
  std::vector<double> default_params;
  bool lossy = false;
  bool poissonian_channels = false;
  bool leakage_warning = false;
  std::string description;
};

/// Image-plane photon position density for an incoherent pair:
/// p(x) = (1-b) |psi(x - x1)|^2 + b |psi(x - x2)|^2.
OutcomePMF direct_pdf(const TwoPointScene& scene, const Psf& psf);

/// Full mode-demultiplexed counting law; outcomes hg0..hgM plus bucket.
OutcomePMF spade_pmf(const TwoPointScene& scene, const Psf& psf,
                     const ModeBasis& basis, double alignment_offset = 0.0);

/// Single target mode plus a bucket for its orthogonal complement.
OutcomePMF bspade_pmf(const TwoPointScene& scene, const Psf& psf,
                      const ModeBasis& basis, int target_mode,
                      double alignment_offset = 0.0);

/// Symmetric/antisymmetric field separation about the receiver axis:
/// p[antisym | d] = (1 - overlap(d, -d)) / 2 per source.
OutcomePMF sliver_pmf(const TwoPointScene& scene, const Psf& psf,
                      double alignment_offset = 0.0);

/// Single antisymmetric projection sign(x) psi(x); everything orthogonal is
/// discarded. Gaussian PSF only.
OutcomePMF splice_pmf(const TwoPointScene& scene, const Psf& psf,
                      double alignment_offset = 0.0);

enum class CoherentNormalization { kPerEmitted, kPerDetected };

/// Mean HG-mode intensities for a (partially) coherent pair, from the 2x2
/// source coherence matrix. Per-emitted normalization by default; the
/// total detected energy then varies with separation.
OutcomePMF coherent_pair_pmf(const CoherentPairScene& scene, const Psf& psf,
                             const ModeBasis& basis,
                             CoherentNormalization norm =
                                 CoherentNormalization::kPerEmitted);

/// Interleaved neighbor-pair superposition counting law for a constellation
/// (used for odd-moment estimation).
OutcomePMF interleaved_pmf(const Constellation& scene, const Psf& psf,
                           const ModeBasis& basis);

/// SPADE law for a weighted-emitter constellation (1D).
OutcomePMF constellation_spade_pmf(const Constellation& scene, const Psf& psf,
                                   const ModeBasis& basis);

/// 2D separable HG counting law for an intensity grid; outcomes are mode
/// pairs (m, n) with m, n <= basis.cutoff plus a shared bucket.
/// Outcome index = m * (cutoff+1) + n.
OutcomePMF grid_spade_pmf_2d(const IntensityGrid& grid, const Psf& psf,
                             const ModeBasis& basis);

/// Post-sorting stochastic confusion of discrete outcomes: p' = p^T X.
OutcomePMF apply_crosstalk(const OutcomePMF& pmf, const Eigen::MatrixXd& x);

/// Convenience: build the PMF matching a receiver description.
OutcomePMF make_pmf(const Receiver& receiver, const TwoPointScene& scene,
                    const Psf& psf);

}  // namespace subray
