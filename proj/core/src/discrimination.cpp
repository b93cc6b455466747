#include "subray/hypothesis/discrimination.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "subray/math/parallel.hpp"
#include "subray/math/rng.hpp"
#include "subray/measure/sampling.hpp"

namespace subray {

namespace {

struct DiscreteTables {
  AliasTable alias1;
  AliasTable alias2;
  std::vector<double> llr;  // log(p2/p1) per outcome; +-inf on one-sided zeros
};

DiscreteTables build_tables(const HypothesisPair& pair) {
  auto full = [](const OutcomePMF& pmf) {
    auto p = pmf.probabilities(pmf.default_params);
    if (pmf.lossy) {
      double detected = 0.0;
      for (double v : p) detected += v;
      p.push_back(std::max(0.0, 1.0 - detected));
    }
    return p;
  };
  const auto p1 = full(pair.p1);
  const auto p2 = full(pair.p2);
  if (p1.size() != p2.size())
    throw std::invalid_argument("hypothesis laws need a common outcome space");
  std::vector<double> llr(p1.size());
  for (size_t k = 0; k < p1.size(); ++k) {
    if (p1[k] <= 0.0 && p2[k] <= 0.0) {
      llr[k] = 0.0;
    } else if (p1[k] <= 0.0) {
      llr[k] = std::numeric_limits<double>::infinity();
    } else if (p2[k] <= 0.0) {
      llr[k] = -std::numeric_limits<double>::infinity();
    } else {
      llr[k] = std::log(p2[k] / p1[k]);
    }
  }
  return {AliasTable(p1), AliasTable(p2), std::move(llr)};
}

}  // namespace

DiscriminationResult simulate_discrimination(
    const HypothesisPair& pair, const std::vector<std::uint64_t>& photon_numbers,
    std::uint64_t trials, std::uint64_t seed) {
  if (photon_numbers.empty() || trials == 0)
    throw std::invalid_argument("need photon numbers and trials");
  if (std::abs(pair.prior1 + pair.prior2 - 1.0) > 1e-12 || pair.prior1 <= 0.0 ||
      pair.prior2 <= 0.0)
    throw std::invalid_argument("priors must be positive and sum to 1");

  const bool discrete = pair.p1.support == Support::kDiscrete;
  if (discrete != (pair.p2.support == Support::kDiscrete))
    throw std::invalid_argument("hypothesis laws need a common support type");

  DiscriminationResult out;
  out.photon_numbers = photon_numbers;
  out.trials_per_n = trials;
  const double log_prior_ratio = std::log(pair.prior1 / pair.prior2);

  DiscreteTables tables = discrete ? build_tables(pair)
                                   : DiscreteTables{AliasTable({1.0}),
                                                    AliasTable({1.0}),
                                                    {}};

  for (std::uint64_t n_photons : photon_numbers) {
    const std::uint64_t block = 4096;
    const std::uint64_t n_blocks = (trials + block - 1) / block;
    std::vector<std::uint64_t> block_errors(n_blocks, 0);

    parallel_blocks(trials, block, [&](std::uint64_t b, std::uint64_t begin,
                                       std::uint64_t end) {
      Xoshiro256 rng(derive_stream_seed(seed ^ (n_photons * 0x9e37ULL), b));
      std::uint64_t errors = 0;
      for (std::uint64_t t = begin; t < end; ++t) {
        const bool truth_is_h2 = rng.uniform() < pair.prior2;
        double llr = 0.0;
        if (discrete) {
          const AliasTable& table = truth_is_h2 ? tables.alias2 : tables.alias1;
          for (std::uint64_t i = 0; i < n_photons; ++i) {
            const double term = tables.llr[table.draw(rng)];
            if (std::isinf(term)) {
              llr = term;
              break;
            }
            llr += term;
          }
        } else {
          const OutcomePMF& law = truth_is_h2 ? pair.p2 : pair.p1;
          for (std::uint64_t i = 0; i < n_photons; ++i) {
            const double x = law.sampler(law.default_params, rng);
            const double d1 = pair.p1.density(x, pair.p1.default_params);
            const double d2 = pair.p2.density(x, pair.p2.default_params);
            if (d1 <= 0.0 || d2 <= 0.0) {
              llr = d1 <= 0.0 ? std::numeric_limits<double>::infinity()
                              : -std::numeric_limits<double>::infinity();
              break;
            }
            llr += std::log(d2 / d1);
          }
        }
        // Bayes rule: decide H2 iff llr > log(prior1/prior2); ties to H1.
        const bool decide_h2 = llr > log_prior_ratio;
        if (decide_h2 != truth_is_h2) ++errors;
      }
      block_errors[b] = errors;
    });

    std::uint64_t total_errors = 0;
    for (auto e : block_errors) total_errors += e;
    out.error_counts.push_back(total_errors);
    out.error_rates.push_back(static_cast<double>(total_errors) /
                              static_cast<double>(trials));
  }

  // Error-count-weighted regression of -log P_e on N over nonzero cells.
  double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
  int usable = 0;
  for (size_t i = 0; i < out.photon_numbers.size(); ++i) {
    if (out.error_counts[i] == 0) continue;
    ++usable;
    const double w = static_cast<double>(out.error_counts[i]);
    const double x = static_cast<double>(out.photon_numbers[i]);
    const double y = -std::log(out.error_rates[i]);
    sw += w;
    swx += w * x;
    swy += w * y;
    swxx += w * x * x;
    swxy += w * x * y;
  }
  out.exponent_is_lower_bound = out.error_counts.back() == 0;
  if (usable >= 2) {
    const double denom = sw * swxx - swx * swx;
    if (std::abs(denom) > 0.0) {
      out.fitted_exponent = (sw * swxy - swx * swy) / denom;
      out.fitted_stderr = std::sqrt(sw / denom);
      out.fit_valid = true;
    }
  }
  return out;
}

}  // namespace subray
