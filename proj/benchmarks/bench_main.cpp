#include <benchmark/benchmark.h>

#include "subray/estimate/estimators.hpp"
#include "subray/hypothesis/chernoff.hpp"
#include "subray/info/fisher.hpp"
#include "subray/info/quantum.hpp"
#include "subray/math/quadrature.hpp"
#include "subray/measure/pmf.hpp"
#include "subray/measure/sampling.hpp"

namespace {

using namespace subray;

const Psf kGauss = Psf::gaussian(0.5);
const ModeBasis kBasis = ModeBasis::hermite_gaussian(0.5, 20);

void AdaptiveQuadratureGaussian(benchmark::State& state) {
  for (auto _ : state) {
    auto r = integrate([](double x) { return std::exp(-x * x); }, -10, 10);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(AdaptiveQuadratureGaussian);

void DisplacedModeLaw(benchmark::State& state) {
  for (auto _ : state) {
    auto p = displaced_mode_probabilities(kGauss, kBasis, 0.37);
    benchmark::DoNotOptimize(p.data());
  }
}
BENCHMARK(DisplacedModeLaw);

void SpadeFisherInformation(benchmark::State& state) {
  const OutcomePMF pmf = spade_pmf(TwoPointScene(0.0, 0.5, 0.5), kGauss, kBasis);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fisher_scalar(pmf, 0.5, 1e-3));
  }
}
BENCHMARK(SpadeFisherInformation);

void DirectFisherInformation(benchmark::State& state) {
  const OutcomePMF pmf = direct_pdf(TwoPointScene(0.0, 0.5, 0.5), kGauss);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fisher_scalar(pmf, 0.5, 1e-3));
  }
}
BENCHMARK(DirectFisherInformation);

void MixtureFidelityQfi(benchmark::State& state) {
  const MixtureStateModel pair = MixtureStateModel::separation_pair(kGauss);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qfi_from_fidelity(pair, 0.5, 1e-3));
  }
}
BENCHMARK(MixtureFidelityQfi);

void ChernoffDiscrete(benchmark::State& state) {
  const OutcomePMF one = spade_pmf(TwoPointScene(0.0, 0.0, 0.5), kGauss, kBasis);
  const OutcomePMF two = spade_pmf(TwoPointScene(0.0, 0.4, 0.5), kGauss, kBasis);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chernoff_exponent(one, two).exponent);
  }
}
BENCHMARK(ChernoffDiscrete);

void SampleSpadeRecord(benchmark::State& state) {
  const OutcomePMF pmf = spade_pmf(TwoPointScene(0.0, 0.3, 0.5), kGauss, kBasis);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto rec = sample_record(pmf, {0.3, 0.0}, state.range(0),
                             BudgetMode::kFixedN, ++seed);
    benchmark::DoNotOptimize(rec.counts.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(SampleSpadeRecord)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
