#include "subray/measure/pmf.hpp"

#include <cmath>
#include <stdexcept>

#include "subray/math/quadrature.hpp"
#include "subray/math/rng.hpp"
#include "subray/math/special.hpp"

namespace subray {

namespace {

struct SourceGeometry {
  std::vector<double> weights;
  std::vector<double> offsets;  // relative to the centroid
  double axis;                  // receiver axis, absolute
};

SourceGeometry pair_geometry(const TwoPointScene& scene,
                             double alignment_offset) {
  SourceGeometry g;
  g.weights = {1.0 - scene.brightness_split, scene.brightness_split};
  g.offsets = {-0.5 * scene.separation, +0.5 * scene.separation};
  g.axis = scene.centroid + alignment_offset;
  return g;
}

// Displacements of the sources from the receiver axis for the given
// (separation, centroid) parameter values.
std::vector<double> pair_displacements(const std::vector<double>& params,
                                       double axis, double split,
                                       std::vector<double>* weights = nullptr) {
  const double theta = params.at(0);
  const double centroid = params.size() > 1 ? params[1] : 0.0;
  if (weights) *weights = {1.0 - split, split};
  return {centroid - 0.5 * theta - axis, centroid + 0.5 * theta - axis};
}

std::vector<std::string> hg_labels(int cutoff) {
  std::vector<std::string> labels;
  for (int n = 0; n <= cutoff; ++n) labels.push_back("hg" + std::to_string(n));
  labels.push_back("bucket");
  return labels;
}

double draw_sinc_position(double w, Xoshiro256& rng) {
  // |psi|^2 = (W/pi) sinc^2(Wx); rejection in u = Wx against the envelope
  // min(1, 1/u^2), which has mass 4 split evenly between |u|<1 and |u|>1.
  for (;;) {
    double u;
    if (rng.uniform() < 0.5) {
      u = 2.0 * rng.uniform() - 1.0;
    } else {
      u = 1.0 / rng.uniform_pos();
      if (rng.uniform() < 0.5) u = -u;
    }
    const double envelope = std::min(1.0, 1.0 / (u * u));
    const double s = (std::abs(u) < 1e-8) ? 1.0 : std::sin(u) / u;
    if (rng.uniform() * envelope <= s * s) return u / w;
  }
}

}  // namespace

std::string Receiver::label() const {
  switch (kind) {
    case ReceiverKind::kDirect: return "direct";
    case ReceiverKind::kSpade: return "spade";
    case ReceiverKind::kBspade: return "bspade";
    case ReceiverKind::kSliver: return "sliver";
    case ReceiverKind::kSplice: return "splice";
    case ReceiverKind::kTrispade: return "trispade";
  }
  return "unknown";
}

OutcomePMF direct_pdf(const TwoPointScene& scene, const Psf& psf) {
  OutcomePMF pmf;
  pmf.support = Support::kContinuous1d;
  pmf.default_params = {scene.separation, scene.centroid};
  pmf.description = "direct imaging position density";
  const double split = scene.brightness_split;
  pmf.density = [psf, split](double x, const std::vector<double>& params) {
    const double theta = params.at(0);
    const double centroid = params.size() > 1 ? params[1] : 0.0;
    const double a1 = psf(x - (centroid - 0.5 * theta));
    const double a2 = psf(x - (centroid + 0.5 * theta));
    return (1.0 - split) * a1 * a1 + split * a2 * a2;
  };
  pmf.detected_fraction = [](const std::vector<double>&) { return 1.0; };
  pmf.domain_halfwidth = [psf](const std::vector<double>& params) {
    const double theta = params.at(0);
    const double centroid = params.size() > 1 ? params[1] : 0.0;
    return psf.domain_halfwidth(std::abs(centroid) + 0.5 * theta);
  };
  pmf.sampler = [psf, split](const std::vector<double>& params,
                             Xoshiro256& rng) {
    const double theta = params.at(0);
    const double centroid = params.size() > 1 ? params[1] : 0.0;
    const double source = (rng.uniform() < split) ? centroid + 0.5 * theta
                                                  : centroid - 0.5 * theta;
    switch (psf.kind()) {
      case PsfKind::kGaussian:
        return source + psf.width_param() * rng.normal();
      case PsfKind::kSinc:
        return source + draw_sinc_position(psf.width_param(), rng);
      case PsfKind::kCustomSampled: {
        // Inverse-CDF on the sample grid, linear within a cell.
        // Rare path; rebuilt per draw would be wasteful, so rejection against
        // the peak works well enough for sampled PSFs of modest support.
        const double half = psf.domain_halfwidth();
        double peak = 0.0;
        for (double x = -half; x <= half; x += half / 256.0)
          peak = std::max(peak, psf(x) * psf(x));
        for (;;) {
          const double x = (2.0 * rng.uniform() - 1.0) * half;
          const double v = psf(x);
          if (rng.uniform() * peak <= v * v) return source + x;
        }
      }
    }
    return source;
  };
  return pmf;
}

OutcomePMF spade_pmf(const TwoPointScene& scene, const Psf& psf,
                     const ModeBasis& basis, double alignment_offset) {
  const SourceGeometry geom = pair_geometry(scene, alignment_offset);
  OutcomePMF pmf;
  pmf.support = Support::kDiscrete;
  pmf.outcome_labels = hg_labels(basis.cutoff);
  pmf.default_params = {scene.separation, scene.centroid};
  pmf.description = "HG mode counting";
  const double split = scene.brightness_split;
  const double axis = geom.axis;
  pmf.probabilities = [psf, basis, axis,
                       split](const std::vector<double>& params) {
    std::vector<double> weights;
    const auto disp = pair_displacements(params, axis, split, &weights);
    std::vector<double> p(basis.cutoff + 2, 0.0);
    for (size_t k = 0; k < disp.size(); ++k) {
      const auto pk = displaced_mode_probabilities(psf, basis, disp[k]);
      for (size_t n = 0; n < p.size(); ++n) p[n] += weights[k] * pk[n];
    }
    return p;
  };
  pmf.detected_fraction = [](const std::vector<double>&) { return 1.0; };
  const auto p0 = pmf.probabilities(pmf.default_params);
  pmf.leakage_warning = p0.back() > 1e-3;
  return pmf;
}

OutcomePMF bspade_pmf(const TwoPointScene& scene, const Psf& psf,
                      const ModeBasis& basis, int target_mode,
                      double alignment_offset) {
  if (target_mode < 0 || target_mode > basis.cutoff)
    throw std::invalid_argument("bspade target mode outside basis cutoff");
  const SourceGeometry geom = pair_geometry(scene, alignment_offset);
  OutcomePMF pmf;
  pmf.support = Support::kDiscrete;
  pmf.outcome_labels = {"hg" + std::to_string(target_mode), "bucket"};
  pmf.default_params = {scene.separation, scene.centroid};
  pmf.description = "binary SPADE (target mode + bucket)";
  const double split = scene.brightness_split;
  const double axis = geom.axis;
  pmf.probabilities = [psf, basis, axis, split,
                       target_mode](const std::vector<double>& params) {
    std::vector<double> weights;
    const auto disp = pair_displacements(params, axis, split, &weights);
    double pt = 0.0;
    for (size_t k = 0; k < disp.size(); ++k) {
      const double a = displaced_amplitude(psf, basis, target_mode, disp[k]);
      pt += weights[k] * a * a;
    }
    return std::vector<double>{pt, 1.0 - pt};
  };
  pmf.detected_fraction = [](const std::vector<double>&) { return 1.0; };
  return pmf;
}

OutcomePMF sliver_pmf(const TwoPointScene& scene, const Psf& psf,
                      double alignment_offset) {
  const SourceGeometry geom = pair_geometry(scene, alignment_offset);
  OutcomePMF pmf;
  pmf.support = Support::kDiscrete;
  pmf.outcome_labels = {"symmetric", "antisymmetric"};
  pmf.default_params = {scene.separation, scene.centroid};
  pmf.description = "image inversion parity separation";
  const double split = scene.brightness_split;
  const double axis = geom.axis;
  pmf.probabilities = [psf, axis, split](const std::vector<double>& params) {
    std::vector<double> weights;
    const auto disp = pair_displacements(params, axis, split, &weights);
    double podd = 0.0;
    for (size_t k = 0; k < disp.size(); ++k) {
      // Energy of the antisymmetric part of psi(x - d) about the axis.
      podd += weights[k] * 0.5 * (1.0 - psf.overlap(disp[k], -disp[k]));
    }
    podd = std::min(std::max(podd, 0.0), 1.0);
    return std::vector<double>{1.0 - podd, podd};
  };
  pmf.detected_fraction = [](const std::vector<double>&) { return 1.0; };
  return pmf;
}

OutcomePMF splice_pmf(const TwoPointScene& scene, const Psf& psf,
                      double alignment_offset) {
  if (psf.kind() != PsfKind::kGaussian)
    throw std::invalid_argument(
        "splice projection mode is defined for Gaussian PSFs only");
  const SourceGeometry geom = pair_geometry(scene, alignment_offset);
  OutcomePMF pmf;
  pmf.support = Support::kDiscrete;
  pmf.outcome_labels = {"click"};
  pmf.default_params = {scene.separation, scene.centroid};
  pmf.description = "antisymmetric sign-mode projection";
  pmf.lossy = true;
  const double split = scene.brightness_split;
  const double axis = geom.axis;
  const double dk = psf.delta_k();
  auto click_probability = [split, axis, dk](const std::vector<double>& params) {
    std::vector<double> weights;
    const auto disp = pair_displacements(params, axis, split, &weights);
    double q = 0.0;
    for (size_t k = 0; k < disp.size(); ++k) {
      // c(d) = int sign(x) psi(x) psi(x - d) dx
      //      = exp(-d^2 dk^2 / 2) erf(d dk / sqrt(2)) for a Gaussian PSF.
      const double d = disp[k];
      const double c = std::exp(-0.5 * d * d * dk * dk) *
                       std::erf(d * dk / std::sqrt(2.0));
      q += weights[k] * c * c;
    }
    return q;
  };
  pmf.probabilities = [click_probability](const std::vector<double>& params) {
    return std::vector<double>{click_probability(params)};
  };
  pmf.detected_fraction = click_probability;
  return pmf;
}

OutcomePMF coherent_pair_pmf(const CoherentPairScene& scene, const Psf& psf,
                             const ModeBasis& basis,
                             CoherentNormalization norm) {
  if (std::abs(scene.gamma) > 1.0 + 1e-12)
    throw std::invalid_argument("|gamma| must be <= 1");
  OutcomePMF pmf;
  pmf.support = Support::kDiscrete;
  pmf.outcome_labels = hg_labels(basis.cutoff);
  pmf.default_params = {scene.separation};
  pmf.description = "coherent pair HG mode intensities";
  pmf.poissonian_channels = true;
  const double re_gamma = scene.gamma.real();
  pmf.probabilities = [psf, basis, re_gamma,
                       norm](const std::vector<double>& params) {
    const double theta = params.at(0);
    // Mean mode intensity per emitted photon for E|a1|^2 = E|a2|^2 = 1/2:
    // m_n = (a_n(+t/2)^2 + a_n(-t/2)^2)/2 + Re(gamma) a_n(+t/2) a_n(-t/2).
    std::vector<double> m(basis.cutoff + 2, 0.0);
    double total = 0.0;
    for (int n = 0; n <= basis.cutoff; ++n) {
      const double ap = displaced_amplitude(psf, basis, n, +0.5 * theta);
      const double am = displaced_amplitude(psf, basis, n, -0.5 * theta);
      m[n] = 0.5 * (ap * ap + am * am) + re_gamma * ap * am;
      m[n] = std::max(m[n], 0.0);
      total += m[n];
    }
    // Bucket: remaining energy of the full (interfering) field.
    const double field_energy =
        1.0 + re_gamma * psf.overlap(0.5 * theta, -0.5 * theta);
    m[basis.cutoff + 1] = std::max(0.0, field_energy - total);
    if (norm == CoherentNormalization::kPerDetected && field_energy > 0.0) {
      for (auto& v : m) v /= field_energy;
    }
    return m;
  };
  pmf.detected_fraction = [psf, re_gamma, norm](const std::vector<double>& params) {
    if (norm == CoherentNormalization::kPerDetected) return 1.0;
    const double theta = params.at(0);
    return 1.0 + re_gamma * psf.overlap(0.5 * theta, -0.5 * theta);
  };
  return pmf;
}

OutcomePMF constellation_spade_pmf(const Constellation& scene, const Psf& psf,
                                   const ModeBasis& basis) {
  scene.validate();
  OutcomePMF pmf;
  pmf.support = Support::kDiscrete;
  pmf.outcome_labels = hg_labels(basis.cutoff);
  pmf.default_params = {0.0};
  pmf.description = "constellation HG mode counting";
  const auto components = mixture_components(scene);
  pmf.probabilities = [psf, basis, components](const std::vector<double>&) {
    std::vector<double> p(basis.cutoff + 2, 0.0);
    for (const auto& c : components) {
      const auto pk = displaced_mode_probabilities(psf, basis, c.displacement);
      for (size_t n = 0; n < p.size(); ++n) p[n] += c.weight * pk[n];
    }
    return p;
  };
  pmf.detected_fraction = [](const std::vector<double>&) { return 1.0; };
  return pmf;
}

OutcomePMF interleaved_pmf(const Constellation& scene, const Psf& psf,
                           const ModeBasis& basis) {
  scene.validate();
  OutcomePMF pmf;
  pmf.support = Support::kDiscrete;
  pmf.default_params = {0.0};
  pmf.description = "interleaved neighbor-pair counting";
  int n = basis.interleave_offset;
  if (basis.interleave_offset == 1) pmf.outcome_labels.push_back("hg0");
  for (; n + 1 <= basis.cutoff; n += 2) {
    pmf.outcome_labels.push_back("pair" + std::to_string(n) + "+");
    pmf.outcome_labels.push_back("pair" + std::to_string(n) + "-");
  }
  if (n <= basis.cutoff)
    pmf.outcome_labels.push_back("hg" + std::to_string(n));
  pmf.outcome_labels.push_back("bucket");
  const auto components = mixture_components(scene);
  pmf.probabilities = [psf, basis, components](const std::vector<double>&) {
    std::vector<double> p;
    for (const auto& c : components) {
      const auto pk = interleaved_mode_probabilities(psf, basis, c.displacement);
      if (p.empty()) p.assign(pk.size(), 0.0);
      for (size_t i = 0; i < p.size(); ++i) p[i] += c.weight * pk[i];
    }
    return p;
  };
  pmf.detected_fraction = [](const std::vector<double>&) { return 1.0; };
  return pmf;
}

OutcomePMF grid_spade_pmf_2d(const IntensityGrid& grid, const Psf& psf,
                             const ModeBasis& basis) {
  grid.validate();
  OutcomePMF pmf;
  pmf.support = Support::kDiscrete;
  pmf.default_params = {0.0};
  pmf.description = "2D HG mode counting on an intensity grid";
  const int m_max = basis.cutoff;
  for (int m = 0; m <= m_max; ++m)
    for (int n = 0; n <= m_max; ++n)
      pmf.outcome_labels.push_back("hg" + std::to_string(m) + "," +
                                   std::to_string(n));
  pmf.outcome_labels.push_back("bucket");
  pmf.probabilities = [grid, psf, basis, m_max](const std::vector<double>&) {
    const int modes = m_max + 1;
    std::vector<double> p(modes * modes + 1, 0.0);
    // Separable kernel: probability of (m, n) from a point mass at (x, y) is
    // pois_m(x) pois_n(y) with pois_m the 1D displaced-mode law.
    for (int j = 0; j < grid.height; ++j) {
      for (int i = 0; i < grid.width; ++i) {
        const double w = grid.at(i, j);
        if (w <= 0.0) continue;
        const auto px = displaced_mode_probabilities(psf, basis, grid.x_of(i));
        const auto py = displaced_mode_probabilities(psf, basis, grid.y_of(j));
        for (int m = 0; m < modes; ++m)
          for (int n = 0; n < modes; ++n)
            p[m * modes + n] += w * px[m] * py[n];
      }
    }
    double captured = 0.0;
    for (int k = 0; k < modes * modes; ++k) captured += p[k];
    p[modes * modes] = std::max(0.0, 1.0 - captured);
    return p;
  };
  pmf.detected_fraction = [](const std::vector<double>&) { return 1.0; };
  return pmf;
}

OutcomePMF apply_crosstalk(const OutcomePMF& pmf, const Eigen::MatrixXd& x) {
  if (pmf.support != Support::kDiscrete)
    throw std::invalid_argument("crosstalk applies to discrete laws only");
  const auto n = static_cast<Eigen::Index>(
      pmf.probabilities(pmf.default_params).size());
  if (x.rows() != n || x.cols() != n)
    throw std::invalid_argument("crosstalk matrix dimensions mismatch");
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (x.row(i).minCoeff() < -1e-12)
      throw std::invalid_argument("crosstalk matrix must be non-negative");
    if (std::abs(x.row(i).sum() - 1.0) > 1e-12)
      throw std::invalid_argument("crosstalk matrix rows must sum to 1");
  }
  OutcomePMF out = pmf;
  auto base = pmf.probabilities;
  out.probabilities = [base, x](const std::vector<double>& params) {
    const auto p = base(params);
    std::vector<double> q(p.size(), 0.0);
    for (size_t j = 0; j < q.size(); ++j)
      for (size_t i = 0; i < p.size(); ++i)
        q[j] += p[i] * x(static_cast<Eigen::Index>(i),
                         static_cast<Eigen::Index>(j));
    return q;
  };
  out.description = pmf.description + " + crosstalk";
  return out;
}

OutcomePMF make_pmf(const Receiver& receiver, const TwoPointScene& scene,
                    const Psf& psf) {
  OutcomePMF pmf;
  switch (receiver.kind) {
    case ReceiverKind::kDirect:
      pmf = direct_pdf(scene, psf);
      break;
    case ReceiverKind::kSpade:
      pmf = spade_pmf(scene, psf, receiver.basis, receiver.alignment_offset);
      break;
    case ReceiverKind::kBspade:
      pmf = bspade_pmf(scene, psf, receiver.basis, receiver.bspade_target,
                       receiver.alignment_offset);
      break;
    case ReceiverKind::kSliver:
      pmf = sliver_pmf(scene, psf, receiver.alignment_offset);
      break;
    case ReceiverKind::kSplice:
      pmf = splice_pmf(scene, psf, receiver.alignment_offset);
      break;
    case ReceiverKind::kTrispade:
      throw std::invalid_argument(
          "trispade applies to 2D scenes; use grid_spade_pmf_2d with cutoff 1");
  }
  if (receiver.crosstalk) pmf = apply_crosstalk(pmf, *receiver.crosstalk);
  return pmf;
}

}  // namespace subray
