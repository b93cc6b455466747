#include <doctest.h>

#include <cmath>

#include "subray/info/bounds.hpp"
#include "subray/info/fisher.hpp"
#include "subray/info/quantum.hpp"
#include "subray/math/rng.hpp"
#include "subray/math/special.hpp"
#include "subray/measure/pmf.hpp"
#include "support/oracles.hpp"

using namespace subray;

namespace {
const Psf kGauss = Psf::gaussian(0.5);  // delta_k = 1
const ModeBasis kBasis = ModeBasis::hermite_gaussian(0.5, 20);
const double kStep = 1e-3;  // h = 1e-3 / delta_k

// Independent Simpson oracle for the direct-imaging Fisher information with
// an analytic theta-derivative of the two-hump density.
double direct_fi_oracle(double theta) {
  const double sigma = 0.5;
  auto f = [&](double x) {
    const double a = kGauss(x - 0.5 * theta);
    const double b = kGauss(x + 0.5 * theta);
    return 0.5 * (a * a + b * b);
  };
  auto df = [&](double x) {
    const double a = kGauss(x - 0.5 * theta);
    const double b = kGauss(x + 0.5 * theta);
    const double da = a * (x - 0.5 * theta) / (2.0 * sigma * sigma);
    const double db = -b * (x + 0.5 * theta) / (2.0 * sigma * sigma);
    return 0.5 * (a * da + b * db);
  };
  return oracles::simpson(
      [&](double x) {
        const double p = f(x);
        if (p < 1e-280) return 0.0;
        const double d = df(x);
        return d * d / p;
      },
      -9.0 - theta, 9.0 + theta, 20001);
}

}  // namespace

TEST_CASE("localization by direct imaging saturates 4 dk^2") {
  const OutcomePMF pmf = direct_pdf(TwoPointScene(0.0, 0.0, 0.5), kGauss);
  const double fi = fisher_information(pmf, {0.0, 0.0}, 1, kStep);
  CHECK(fi == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("direct-imaging separation information collapses quadratically") {
  // Small-separation law FI -> 2 theta^2 dk^4 (the relative-error table's
  // leading coefficient), checked against an independent Simpson oracle.
  const OutcomePMF pmf = direct_pdf(TwoPointScene(0.0, 0.1, 0.5), kGauss);
  const double fi = fisher_scalar(pmf, 0.1, kStep);
  CHECK(fi == doctest::Approx(direct_fi_oracle(0.1)).epsilon(5e-3));
  CHECK(fi == doctest::Approx(2.0 * 0.1 * 0.1).epsilon(0.03));
}

TEST_CASE("spade information is flat at dk^2 for all separations") {
  for (double theta : {0.1, 1.0, 3.0}) {
    const OutcomePMF pmf = spade_pmf(TwoPointScene(0.0, theta, 0.5), kGauss,
                                     ModeBasis::hermite_gaussian(0.5, 40));
    CHECK(fisher_scalar(pmf, theta, kStep) ==
          doctest::Approx(1.0).epsilon(5e-3));
  }
}

TEST_CASE("central differences match the analytic poisson-model information") {
  // Full-mode SPADE law: exact information dk^2 from the displaced Poisson
  // family; the finite-difference estimate must agree to 0.1%.
  const OutcomePMF pmf = spade_pmf(TwoPointScene(0.0, 0.6, 0.5), kGauss,
                                   ModeBasis::hermite_gaussian(0.5, 40));
  CHECK(fisher_scalar(pmf, 0.6, kStep) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("fisher matrix: degeneracy at zero separation, reduction, inequality") {
  const OutcomePMF pmf = spade_pmf(TwoPointScene(0.0, 0.0, 0.5), kGauss, kBasis);
  const FisherMatrix fm =
      fisher_matrix(pmf, {0.0, 0.0}, {kStep, kStep}, {"theta", "centroid"});
  CHECK(fm.degenerate);
  CHECK(std::abs(fm.matrix(0, 0)) < 1e-6);  // theta row vanishes at theta = 0
  const Eigen::MatrixXd inv = fm.inverse();
  CHECK(std::isfinite(inv(1, 1)));

  // Single-parameter reduction agrees with fisher_scalar.
  const OutcomePMF p2 = spade_pmf(TwoPointScene(0.0, 0.8, 0.5), kGauss, kBasis);
  const FisherMatrix one = fisher_matrix(p2, {0.8, 0.0}, {kStep, kStep});
  CHECK(one.matrix(0, 0) ==
        doctest::Approx(fisher_scalar(p2, 0.8, kStep)).epsilon(1e-9));

  // (I^{-1})_jj >= 1 / I_jj on correlated two-parameter scenes.
  for (double theta : {0.4, 0.9, 1.7}) {
    const OutcomePMF p = spade_pmf(TwoPointScene(0.0, theta, 0.3), kGauss,
                                   kBasis, 0.2);
    const FisherMatrix m = fisher_matrix(p, {theta, 0.0}, {kStep, kStep});
    if (m.degenerate) continue;
    const Eigen::MatrixXd inv = m.inverse();
    for (int j = 0; j < 2; ++j)
      CHECK(inv(j, j) >= 1.0 / m.matrix(j, j) - 1e-9);
  }
}

TEST_CASE("symmetry and positive semidefiniteness of the fisher matrix") {
  const OutcomePMF pmf =
      spade_pmf(TwoPointScene(0.0, 0.5, 0.4), kGauss, kBasis, 0.1);
  const FisherMatrix m = fisher_matrix(pmf, {0.5, 0.0}, {kStep, kStep});
  CHECK((m.matrix - m.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.matrix);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("zero probability with nonzero derivative raises the singular flag") {
  OutcomePMF pmf;
  pmf.support = Support::kDiscrete;
  pmf.default_params = {0.0};
  pmf.probabilities = [](const std::vector<double>& params) {
    const double t = std::max(params[0], 0.0);
    return std::vector<double>{t, 1.0 - t};
  };
  pmf.detected_fraction = [](const std::vector<double>&) { return 1.0; };
  FisherDiagnostics diag;
  fisher_information(pmf, {0.0}, 0, 1e-4, &diag);
  CHECK(diag.singular_support);
}

TEST_CASE("information is invariant under relabeling and zero padding") {
  const OutcomePMF base = spade_pmf(TwoPointScene(0.0, 0.5, 0.5), kGauss, kBasis);
  const double fi = fisher_scalar(base, 0.5, kStep);

  OutcomePMF permuted = base;
  auto inner = base.probabilities;
  permuted.probabilities = [inner](const std::vector<double>& params) {
    auto p = inner(params);
    std::reverse(p.begin(), p.end());
    return p;
  };
  CHECK(fisher_scalar(permuted, 0.5, kStep) == doctest::Approx(fi).epsilon(1e-12));

  OutcomePMF padded = base;
  padded.probabilities = [inner](const std::vector<double>& params) {
    auto p = inner(params);
    p.insert(p.begin(), 0.0);
    p.push_back(0.0);
    return p;
  };
  CHECK(fisher_scalar(padded, 0.5, kStep) == doctest::Approx(fi).epsilon(1e-12));
}

TEST_CASE("stochastic crosstalk never increases information") {
  const ModeBasis small = ModeBasis::hermite_gaussian(0.5, 6);
  const OutcomePMF pmf = spade_pmf(TwoPointScene(0.0, 0.5, 0.5), kGauss, small);
  const double fi = fisher_scalar(pmf, 0.5, kStep);
  Xoshiro256 rng(derive_stream_seed(2024, 0));
  const int outcomes = 8;  // 6 modes + 1 + bucket
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd x(outcomes, outcomes);
    for (int i = 0; i < outcomes; ++i) {
      double row_sum = 0.0;
      for (int j = 0; j < outcomes; ++j) {
        x(i, j) = rng.uniform() + 1e-3;
        row_sum += x(i, j);
      }
      x.row(i) /= row_sum;
    }
    const double fi_mixed = fisher_scalar(apply_crosstalk(pmf, x), 0.5, kStep);
    CHECK(fi_mixed <= fi + 1e-9);
  }
}

TEST_CASE("every receiver obeys the quantum bound across the grid") {
  const MixtureStateModel mixture = MixtureStateModel::separation_pair(kGauss);
  for (double theta : {0.05, 0.2, 0.5, 1.0, 2.0, 3.0}) {
    const TwoPointScene scene(0.0, theta, 0.5);
    const double qfi = qfi_from_fidelity(mixture, theta, kStep);
    CHECK(qfi == doctest::Approx(1.0).epsilon(1e-3));
    const double fi_spade = fisher_scalar(
        spade_pmf(scene, kGauss, ModeBasis::hermite_gaussian(0.5, 40)), theta,
        kStep);
    const double fi_sliver =
        fisher_scalar(sliver_pmf(scene, kGauss), theta, kStep);
    const double fi_splice =
        fisher_scalar(splice_pmf(scene, kGauss), theta, kStep);
    const double fi_direct =
        fisher_scalar(direct_pdf(scene, kGauss), theta, kStep);
    for (double fi : {fi_spade, fi_sliver, fi_splice, fi_direct})
      CHECK(fi <= qfi + 1e-3);
  }
}

TEST_CASE("qfi from fidelity: localization, pair, coherent in-phase") {
  const MixtureStateModel loc = MixtureStateModel::localization(kGauss);
  CHECK(qfi_from_fidelity(loc, 0.3, kStep) == doctest::Approx(4.0).epsilon(1e-3));

  const MixtureStateModel pair = MixtureStateModel::separation_pair(kGauss);
  for (double theta : {0.2, 1.0, 2.0})
    CHECK(qfi_from_fidelity(pair, theta, kStep) ==
          doctest::Approx(1.0).epsilon(1e-3));

  // Coherent in-phase pair: Rayleigh's curse, QFI -> 0 with theta.
  const CoherentPairStateModel inphase{kGauss, {std::sqrt(0.5), 0.0},
                                       {std::sqrt(0.5), 0.0}};
  CHECK(std::abs(qfi_from_fidelity(inphase, 1e-3, kStep)) < 1e-4);

  CHECK_THROWS_AS(qfi_from_fidelity(pair, 0.5, 1e-12), std::runtime_error);
}

TEST_CASE("partial coherence bound and kappa limits") {
  CHECK(kappa(kGauss, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(kappa(kGauss, 50.0)) < 1e-12);

  const double n = 3.0;
  for (double theta : {0.1, 0.5, 2.0})
    CHECK(qfi_partial_coherence_bound({0.0, 0.0}, theta, kGauss, n) ==
          doctest::Approx(n).epsilon(1e-12));
  CHECK(qfi_partial_coherence_bound({-1.0, 0.0}, 1e-6, kGauss, n) ==
        doctest::Approx(2.0 * n).epsilon(1e-6));
  CHECK(qfi_partial_coherence_bound({1.0, 0.0}, 1e-6, kGauss, n) ==
        doctest::Approx(0.0).scale(1).epsilon(1e-6));
}

TEST_CASE("bias-corrected bound: limits and the poisson-model curve") {
  CHECK(bias_corrected_crb(0.0, 0.0, 2.0, 50.0, 0.3) ==
        doctest::Approx(1.0 / 100.0).epsilon(1e-12));
  // Always-zero estimator: b = -theta, db/dtheta = -1, bound = theta^2.
  CHECK(bias_corrected_crb(-0.3, -1.0, 2.0, 50.0, 0.3) ==
        doctest::Approx(0.09).epsilon(1e-12));

  // SPADE MLE under the Poisson model: below the QCRB at small separations,
  // above it in the bias hump.
  const double n = 100.0, qcrb = 1.0 / n;
  auto bound_at = [&](double theta) {
    const double b = oracles::poisson_mle_bias(n, theta, 1.0);
    const double db = oracles::poisson_mle_bias_derivative(n, theta, 1.0);
    return bias_corrected_crb(b, db, 1.0, n, theta);
  };
  CHECK(bound_at(0.05) < qcrb);
  CHECK(bound_at(0.40) > qcrb);
}

TEST_CASE("van trees bound") {
  CHECK(van_trees_bound(0.0, 2.0, 10.0) == doctest::Approx(0.05).epsilon(1e-12));
  // Gaussian prior with tau = 1: J = 1/tau^2 = 1.
  CHECK(van_trees_bound(1.0, 1.0, 100.0) ==
        doctest::Approx(1.0 / 101.0).epsilon(1e-12));
  double prev = 1e9;
  for (double n : {1.0, 10.0, 100.0, 1000.0}) {
    const double b = van_trees_bound(1.0, 1.0, n);
    CHECK(b < prev);
    prev = b;
  }
}

namespace {

// Extrapolated leading coefficient of f(t) ~ c t^p (1 + a t^2) from a small-t
// grid, by least squares in the basis {t^p, t^{p+2}}.
double leading_coefficient(const std::function<double(double)>& f, int p) {
  double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
  for (double t : {0.02, 0.04, 0.06, 0.08, 0.10}) {
    const double x1 = std::pow(t, p), x2 = std::pow(t, p + 2);
    const double y = f(t);
    s11 += x1 * x1;
    s12 += x1 * x2;
    s22 += x2 * x2;
    b1 += x1 * y;
    b2 += x2 * y;
  }
  const double det = s11 * s22 - s12 * s12;
  return (b1 * s22 - b2 * s12) / det;
}

}  // namespace

TEST_CASE("modified information leading coefficients (relative error table)") {
  auto modified = [&](const std::function<OutcomePMF(double)>& make) {
    return [make](double theta) {
      return modified_fi_relative(fisher_scalar(make(theta), theta, 1e-4),
                                  theta);
    };
  };
  const auto spade = modified([](double theta) {
    return spade_pmf(TwoPointScene(0.0, theta, 0.5), kGauss, kBasis);
  });
  const auto sliver = modified([](double theta) {
    return sliver_pmf(TwoPointScene(0.0, theta, 0.5), kGauss);
  });
  const auto splice = modified([](double theta) {
    return splice_pmf(TwoPointScene(0.0, theta, 0.5), kGauss);
  });
  const auto direct = modified([](double theta) {
    return direct_pdf(TwoPointScene(0.0, theta, 0.5), kGauss);
  });

  CHECK(spade(1.0) == doctest::Approx(1.0).epsilon(5e-3));  // (theta dk)^2
  CHECK(leading_coefficient(spade, 2) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(leading_coefficient(sliver, 2) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(leading_coefficient(splice, 2) ==
        doctest::Approx(2.0 / kPi).epsilon(0.02));
  CHECK(leading_coefficient(direct, 4) == doctest::Approx(2.0).epsilon(0.05));

  CHECK_THROWS_AS(modified_fi_relative(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("three-dimensional localization bound") {
  const Eigen::Matrix3d m = qcrb_3d(1.0, 10.0, 1.0);
  CHECK(m(0, 0) == doctest::Approx(1.0));
  CHECK(m(1, 1) == doctest::Approx(1.0));
  CHECK(m(2, 2) == doctest::Approx(100.0));
  CHECK(m(0, 1) == 0.0);

  const Eigen::Matrix3d scaled = qcrb_3d(1.0, 10.0, 100.0);
  CHECK(scaled(2, 2) == doctest::Approx(1.0));
  CHECK(scaled(0, 0) == doctest::Approx(scaled(1, 1)).epsilon(1e-15));
}

TEST_CASE("bound report renders sentinels and provenance") {
  BoundReport report;
  report.theta = {0.0, 0.5};
  report.crb_direct = {std::numeric_limits<double>::infinity(), 2.0};
  report.crb_receiver = {1.0, 1.0};
  report.qcrb = {1.0, 1.0};
  report.provenance = {"fisher: central differences"};
  const std::string text = report.to_delimited();
  CHECK(text.find("inf") != std::string::npos);
  CHECK(text.find("# fisher: central differences") != std::string::npos);
  CHECK(text.find("theta,crb_direct,crb_receiver,qcrb") != std::string::npos);
}
