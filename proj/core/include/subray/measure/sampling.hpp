#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "subray/measure/pmf.hpp"

namespace subray {

enum class BudgetMode { kFixedN, kPoissonN };

/// One simulated photon-counting acquisition.
struct DetectionRecord {
  std::string receiver;
  std::vector<double> params;
  std::uint64_t photons_emitted = 0;
  BudgetMode budget = BudgetMode::kFixedN;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> counts;   // discrete outcomes, PMF order
  std::uint64_t discarded = 0;         // lossy receivers
  std::vector<double> positions;       // continuous support

  std::uint64_t total_detected() const;
};

/// Draws a record from the law. fixed-N emits exactly N photons; poisson-N
/// draws the photon number from Poisson(N). Poissonian-channel laws
/// (coherent scenes) draw each channel count from an independent Poisson
/// with mean N * m_n. Deterministic given the seed.
DetectionRecord sample_record(const OutcomePMF& pmf,
                              const std::vector<double>& params,
                              std::uint64_t n_photons, BudgetMode budget,
                              std::uint64_t seed);

/// Single-line structured text round-trip; one record per line in batches.
std::string serialize_record(const DetectionRecord& record);
DetectionRecord parse_record(const std::string& line);
void write_records(std::ostream& out, const std::vector<DetectionRecord>& rs);
std::vector<DetectionRecord> read_records(std::istream& in);

/// O(1) categorical sampling after O(K) setup.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights);
  std::size_t draw(Xoshiro256& rng) const;

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

}  // namespace subray
