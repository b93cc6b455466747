#include <doctest.h>

#include <cmath>

#include "subray/math/rng.hpp"
#include "subray/math/special.hpp"
#include "subray/measure/pmf.hpp"
#include "subray/moments/baseline.hpp"
#include "subray/moments/moments.hpp"
#include "subray/moments/reconstruct.hpp"
#include "support/oracles.hpp"

using namespace subray;

namespace {
const Psf kGauss = Psf::gaussian(0.5);  // delta_k = 1

IntensityGrid point_grid(double x, double y = 0.0) {
  IntensityGrid g;
  g.width = 1;
  g.height = 1;
  g.pixel_pitch = 0.01;
  g.x0 = x;
  g.y0 = y;
  g.values = {1.0};
  return g;
}

IntensityGrid two_bar_grid(int n = 40, double support = 0.4) {
  // Two vertical bars, symmetric about the center, inside [-s/2, s/2]^2.
  IntensityGrid g;
  g.width = n;
  g.height = n;
  g.pixel_pitch = support / n;
  g.x0 = -0.5 * support + 0.5 * g.pixel_pitch;
  g.y0 = -0.5 * support + 0.5 * g.pixel_pitch;
  g.values.assign(static_cast<size_t>(n) * n, 0.0);
  const int bar1 = n / 4, bar2 = 3 * n / 4;
  for (int j = n / 8; j < n - n / 8; ++j) {
    for (int di = -n / 20; di <= n / 20; ++di) {
      g.at(bar1 + di, j) = 1.0;
      g.at(bar2 + di, j) = 1.0;
    }
  }
  g.normalize();
  return g;
}

}  // namespace

TEST_CASE("coherent moments: point-like field and the first-moment ratio") {
  // Narrow unit-mass field at the origin: only the fundamental couples.
  FieldGrid narrow;
  narrow.width = 41;
  narrow.height = 1;
  narrow.pixel_pitch = 1e-4;
  narrow.x0 = -20e-4;
  narrow.y0 = 0.0;
  narrow.values.assign(41, 0.0);
  double mass = 0.0;
  for (int i = 0; i < 41; ++i) {
    const double u = (i - 20) / 8.0;
    narrow.values[i] = std::exp(-u * u);
    mass += narrow.values[i];
  }
  for (auto& v : narrow.values) v /= mass;
  CHECK(coherent_moment(narrow, 0, 0, 1.0) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(std::abs(coherent_moment(narrow, 1, 0, 1.0)) < 1e-6);
  CHECK(std::abs(coherent_moment(narrow, 2, 0, 1.0)) < 1e-5);
  CHECK(std::abs(coherent_moment(narrow, 0, 1, 1.0)) < 1e-12);

  // Narrow off-axis field at x0: J_10 / J_00 -> x0 dk as the support shrinks.
  const double x_off = 0.3;
  FieldGrid off = narrow;
  off.x0 += x_off;
  CHECK(coherent_moment(off, 1, 0, 1.0) / coherent_moment(off, 0, 0, 1.0) ==
        doctest::Approx(x_off).epsilon(1e-4));
}

TEST_CASE("incoherent moments: point sources and spade consistency") {
  // Point source at x0 (1D): P_1 = (x0 dk)^2 e^{-(x0 dk)^2}.
  const double x0 = 0.35;
  const auto g = point_grid(x0);
  CHECK(incoherent_moment(g, 1, 0, 1.0) ==
        doctest::Approx(x0 * x0 * std::exp(-x0 * x0)).epsilon(1e-12));
  // Cross-check against the displaced mode law.
  const auto p = displaced_mode_probabilities(
      kGauss, ModeBasis::hermite_gaussian(0.5, 5), x0);
  CHECK(incoherent_moment(g, 1, 0, 1.0) == doctest::Approx(p[1]).epsilon(1e-12));

  // Centered point source: everything beyond (0,0) vanishes.
  const auto c = point_grid(0.0);
  CHECK(incoherent_moment(c, 0, 0, 1.0) == doctest::Approx(1.0));
  for (int m = 0; m <= 3; ++m)
    for (int n = 0; n <= 3; ++n)
      if (m + n > 0) CHECK(incoherent_moment(c, m, n, 1.0) == 0.0);
}

TEST_CASE("moment kernels equal the 2D spade law on random grids") {
  Xoshiro256 rng(derive_stream_seed(77, 0));
  IntensityGrid g;
  g.width = 7;
  g.height = 7;
  g.pixel_pitch = 0.08;
  g.x0 = -0.24;
  g.y0 = -0.24;
  g.values.assign(49, 0.0);
  for (auto& v : g.values) v = rng.uniform();
  g.normalize();

  const ModeBasis basis = ModeBasis::hermite_gaussian(0.5, 5);
  const OutcomePMF pmf = grid_spade_pmf_2d(g, kGauss, basis);
  const auto p = pmf.probabilities({});
  for (int m = 0; m <= 5; ++m)
    for (int n = 0; n <= 5; ++n)
      CHECK(incoherent_moment(g, m, n, 1.0) ==
            doctest::Approx(p[m * 6 + n]).scale(1).epsilon(1e-9));
}

TEST_CASE("estimated moments: concentration, degenerate scene, error scaling") {
  const auto bars = two_bar_grid();
  const ModeBasis basis = ModeBasis::hermite_gaussian(0.5, 4);
  const OutcomePMF pmf = grid_spade_pmf_2d(bars, kGauss, basis);
  const auto rec =
      sample_record(pmf, {}, 1000000, BudgetMode::kFixedN, 2025);
  const MomentSet set = estimate_moments(rec, basis.cutoff);
  CHECK_FALSE(set.interleaved_available);
  for (int m = 0; m <= 3; ++m)
    for (int n = 0; n <= 3 - m; ++n) {
      const auto* e = set.find(m, n);
      REQUIRE(e != nullptr);
      const double exact = incoherent_moment(bars, m, n, 1.0);
      CHECK(std::abs(e->value - exact) <= 3.0 * e->std_error + 1e-12);
    }

  // Point scene at the axis: higher moments vanish identically.
  const OutcomePMF point_pmf =
      grid_spade_pmf_2d(point_grid(0.0), kGauss, basis);
  const auto point_rec =
      sample_record(point_pmf, {}, 100000, BudgetMode::kFixedN, 4);
  const MomentSet point_set = estimate_moments(point_rec, basis.cutoff);
  for (const auto& e : point_set.entries)
    if (e.m + e.n > 0) CHECK(e.value == 0.0);

  // Quadrupling the photon number halves the standard errors.
  DetectionRecord a;
  a.photons_emitted = 10000;
  a.counts.assign(26, 0);
  a.counts[0] = 9000;
  a.counts[1] = 1000;
  DetectionRecord b = a;
  b.photons_emitted = 40000;
  for (auto& c : b.counts) c *= 4;
  const auto sa = estimate_moments(a, 4);
  const auto sb = estimate_moments(b, 4);
  CHECK(sb.entries[1].std_error ==
        doctest::Approx(0.5 * sa.entries[1].std_error).epsilon(1e-12));
}

TEST_CASE("interleaved records recover odd kernels") {
  // Asymmetric three-emitter constellation.
  const auto scene = Constellation::points1d({-0.15, 0.05, 0.25},
                                             {0.2, 0.5, 0.3});
  for (int offset : {0, 1}) {
    const ModeBasis basis = ModeBasis::interleaved(0.5, 9, offset);
    const OutcomePMF pmf = interleaved_pmf(scene, kGauss, basis);
    const auto rec = sample_record(pmf, {}, 2000000, BudgetMode::kFixedN, 31);
    MomentSet set;
    add_interleaved_moments(set, rec, basis);
    CHECK(set.interleaved_available);
    for (const auto& e : set.entries) {
      const double exact = interleaved_odd_moment(scene, e.m, 1.0);
      CHECK(std::abs(e.value - exact) <= 4.0 * e.std_error + 1e-9);
    }
  }
}

TEST_CASE("reconstruction: point source localizes to one cell") {
  // Even kernels alone cannot break the mirror symmetry, so the forward
  // model includes the interleaved odd kernels in x (point kept on the y
  // axis of symmetry).
  const double x_true = 0.08;
  const auto g = point_grid(x_true, 0.0);
  MomentSet set;
  for (int m = 0; m <= 4; ++m)
    for (int n = 0; n <= 4 - m; ++n) {
      MomentEstimate e;
      e.m = m;
      e.n = n;
      e.value = incoherent_moment(g, m, n, 1.0);
      e.std_error = 1e-6;
      set.entries.push_back(e);
    }
  const auto point = Constellation::points1d({x_true}, {1.0});
  for (int m = 0; m <= 3; ++m) {
    MomentEstimate e;
    e.m = m;
    e.n = 0;
    e.parity = MomentParity::kOdd;
    e.value = interleaved_odd_moment(point, m, 1.0);
    e.std_error = 1e-6;
    set.entries.push_back(e);
  }
  SupportRectangle support{-0.2, 0.2, -0.2, 0.2};
  const auto result = reconstruct(set, 1.0, support, 9, 1e-5, 8);
  int best = 0;
  for (size_t i = 0; i < result.estimate.values.size(); ++i)
    if (result.estimate.values[i] > result.estimate.values[best])
      best = static_cast<int>(i);
  const int bi = best % 9, bj = best / 9;
  CHECK(std::abs(result.estimate.x_of(bi) - x_true) <=
        result.estimate.pixel_pitch + 1e-12);
  CHECK(std::abs(result.estimate.y_of(bj)) <=
        result.estimate.pixel_pitch + 1e-12);
}

namespace {

MomentSet even_moments_of(const IntensityGrid& g, int order) {
  MomentSet set;
  for (int m = 0; m <= order; ++m)
    for (int n = 0; n <= order - m; ++n) {
      MomentEstimate e;
      e.m = m;
      e.n = n;
      e.value = incoherent_moment(g, m, n, 1.0);
      e.std_error = 1e-6;
      set.entries.push_back(e);
    }
  return set;
}

double l2_distance(const IntensityGrid& a, const IntensityGrid& b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace

TEST_CASE("even-only reconstruction sees the symmetrized object") {
  // Off-center bar on a 1D-like strip: even kernels cannot tell it from its
  // mirror image, so the reconstruction matches the symmetrization's.
  IntensityGrid bar;
  bar.width = 12;
  bar.height = 1;
  bar.pixel_pitch = 0.03;
  bar.x0 = -0.165;
  bar.y0 = 0.0;
  bar.values.assign(12, 0.0);
  for (int i = 7; i <= 10; ++i) bar.values[i] = 1.0;
  bar.normalize();

  IntensityGrid mirrored = bar;
  for (int i = 0; i < 12; ++i)
    mirrored.values[i] = 0.5 * (bar.values[i] + bar.values[11 - i]);

  // Same even moments -> identical reconstructions (deterministic solver).
  const auto set_a = even_moments_of(bar, 6);
  const auto set_b = even_moments_of(mirrored, 6);
  for (size_t i = 0; i < set_a.entries.size(); ++i)
    CHECK(set_a.entries[i].value ==
          doctest::Approx(set_b.entries[i].value).scale(1).epsilon(1e-12));

  SupportRectangle support{-0.18, 0.18, -0.18, 0.18};
  const auto ra = reconstruct(set_a, 1.0, support, 12, 1e-4, 8);
  const auto rb = reconstruct(set_b, 1.0, support, 12, 1e-4, 8);
  CHECK(l2_distance(ra.estimate, rb.estimate) < 1e-9);

  // And the x-profile of the reconstruction is symmetric.
  const auto& est = ra.estimate;
  std::vector<double> profile(12, 0.0);
  for (int j = 0; j < 12; ++j)
    for (int i = 0; i < 12; ++i) profile[i] += est.at(i, j);
  for (int i = 0; i < 6; ++i)
    CHECK(profile[i] == doctest::Approx(profile[11 - i]).scale(1).epsilon(1e-6));
}

TEST_CASE("reconstruction error is non-increasing with moment order") {
  const auto bars = two_bar_grid(24, 0.4);
  SupportRectangle support{-0.2, 0.2, -0.2, 0.2};
  double prev = 1e9;
  for (int order : {1, 2, 3, 4}) {  // P-index order: source moments 2..8
    const auto set = even_moments_of(bars, order);
    const auto result = reconstruct(set, 1.0, support, 24, 1e-4, 8);
    // Compare on the shared 24x24 support grid.
    const double err = l2_distance(result.estimate, bars);
    CHECK(err <= prev + 1e-9);
    prev = err;
  }
}

TEST_CASE("strong smoothing flattens the reconstruction") {
  const auto bars = two_bar_grid(16, 0.4);
  const auto set = even_moments_of(bars, 3);
  SupportRectangle support{-0.2, 0.2, -0.2, 0.2};
  const auto flat = reconstruct(set, 1.0, support, 16, 1e9, 8);
  double lo = 1e9, hi = 0.0;
  for (double v : flat.estimate.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi - lo < 0.2 * hi + 1e-9);
}

TEST_CASE("diffraction baseline: point response, energy, spectral width") {
  // Point source maps to |psi|^2 sampled on the grid.
  const auto point = point_grid(0.0);
  const auto blurred = diffraction_baseline(point, kGauss);
  double total = 0.0;
  for (double v : blurred.values) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  // Compare the central row with the normalized intensity profile.
  const int jc = blurred.height / 2;
  const double peak = kGauss(0.0) * kGauss(0.0);
  for (int di : {0, 3, 7}) {
    const int i = blurred.width / 2 + di;
    const double x = blurred.x_of(i);
    const double expected = kGauss(x) * kGauss(x) / peak;
    const double got =
        blurred.at(i, jc) / blurred.at(blurred.width / 2, jc);
    CHECK(got == doctest::Approx(expected).scale(1).epsilon(1e-6));
  }

  // OTF width: the intensity spectrum's second moment doubles the amplitude
  // spectrum's (autocorrelation doubles variances), checked with a DFT.
  const int n = 512;
  std::vector<double> amp(n), inten(n);
  for (int i = 0; i < n; ++i) {
    const double x = -8.0 + 16.0 * i / n;
    amp[i] = kGauss(x);
    inten[i] = amp[i] * amp[i];
  }
  const auto atf = oracles::dft(amp);
  const auto otf = oracles::dft(inten);
  auto spectral_var = [&](const std::vector<std::complex<double>>& f) {
    double w = 0.0, m2 = 0.0;
    for (int k = 0; k < n; ++k) {
      const int kk = k <= n / 2 ? k : k - n;  // signed frequency index
      const double mag = std::abs(f[k]);
      w += mag;
      m2 += mag * kk * kk;
    }
    return m2 / w;
  };
  CHECK(spectral_var(otf) ==
        doctest::Approx(2.0 * spectral_var(atf)).epsilon(0.01));
}

TEST_CASE("baseline convolution preserves total intensity on any scene") {
  const auto bars = two_bar_grid(20, 0.4);
  const auto blurred = diffraction_baseline(bars, kGauss);
  double total = 0.0;
  for (double v : blurred.values) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}
