#include "subray/measure/sampling.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "subray/math/rng.hpp"

namespace subray {

std::uint64_t DetectionRecord::total_detected() const {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  return total + positions.size();
}

AliasTable::AliasTable(const std::vector<double>& weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw std::invalid_argument("empty categorical distribution");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w))
      throw std::invalid_argument("categorical weights must be finite >= 0");
    sum += w;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("categorical weights sum to 0");
  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * n / sum;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back(), l = large.back();
    small.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::size_t i : large) prob_[i] = 1.0;
  for (std::size_t i : small) prob_[i] = 1.0;
}

std::size_t AliasTable::draw(Xoshiro256& rng) const {
  const double u = rng.uniform() * static_cast<double>(prob_.size());
  std::size_t i = static_cast<std::size_t>(u);
  if (i >= prob_.size()) i = prob_.size() - 1;
  const double frac = u - static_cast<double>(i);
  return frac < prob_[i] ? i : alias_[i];
}

DetectionRecord sample_record(const OutcomePMF& pmf,
                              const std::vector<double>& params,
                              std::uint64_t n_photons, BudgetMode budget,
                              std::uint64_t seed) {
  if (n_photons == 0) throw std::invalid_argument("photon budget must be > 0");
  DetectionRecord rec;
  rec.receiver = pmf.description;
  rec.params = params;
  rec.photons_emitted = n_photons;
  rec.budget = budget;
  rec.seed = seed;

  Xoshiro256 rng(derive_stream_seed(seed, 0));
  if (pmf.support == Support::kContinuous1d) {
    if (!pmf.sampler)
      throw std::invalid_argument("continuous law lacks a position sampler");
    const std::uint64_t n = budget == BudgetMode::kFixedN
                                ? n_photons
                                : rng.poisson(static_cast<double>(n_photons));
    rec.positions.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i)
      rec.positions.push_back(pmf.sampler(params, rng));
    return rec;
  }

  const auto p = pmf.probabilities(params);
  for (double v : p)
    if (v < -1e-12 || !std::isfinite(v))
      throw std::invalid_argument("invalid outcome probabilities");

  if (pmf.poissonian_channels) {
    // Independent Poisson counts with mean N * m_k (coherent light).
    rec.counts.assign(p.size(), 0);
    for (std::size_t k = 0; k < p.size(); ++k)
      rec.counts[k] = rng.poisson(static_cast<double>(n_photons) *
                                  std::max(p[k], 0.0));
    return rec;
  }

  const std::uint64_t n = budget == BudgetMode::kFixedN
                              ? n_photons
                              : rng.poisson(static_cast<double>(n_photons));
  std::vector<double> weights = p;
  double detected = 0.0;
  for (double v : weights) detected += v;
  const bool has_discard = pmf.lossy && detected < 1.0 - 1e-12;
  if (has_discard) weights.push_back(1.0 - detected);
  const AliasTable table(weights);
  rec.counts.assign(p.size(), 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::size_t k = table.draw(rng);
    if (k < p.size())
      ++rec.counts[k];
    else
      ++rec.discarded;
  }
  return rec;
}

std::string serialize_record(const DetectionRecord& rec) {
  std::string receiver = rec.receiver;
  for (auto& c : receiver)
    if (c == ' ') c = '-';
  std::ostringstream out;
  out.precision(17);
  out << "record v1"
      << " receiver=" << receiver
      << " budget=" << (rec.budget == BudgetMode::kFixedN ? "fixed" : "poisson")
      << " N=" << rec.photons_emitted << " seed=" << rec.seed << " params=";
  for (std::size_t i = 0; i < rec.params.size(); ++i)
    out << (i ? "," : "") << rec.params[i];
  if (!rec.counts.empty()) {
    out << " counts=";
    for (std::size_t i = 0; i < rec.counts.size(); ++i)
      out << (i ? "," : "") << rec.counts[i];
    out << " discarded=" << rec.discarded;
  }
  if (!rec.positions.empty()) {
    out << " positions=";
    for (std::size_t i = 0; i < rec.positions.size(); ++i)
      out << (i ? "," : "") << rec.positions[i];
  }
  return out.str();
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, sep)) out.push_back(tok);
  return out;
}

}  // namespace

DetectionRecord parse_record(const std::string& line) {
  if (line.rfind("record v1", 0) != 0)
    throw std::invalid_argument("record line missing 'record v1' prefix");
  DetectionRecord rec;
  std::istringstream in(line.substr(9));
  std::string field;
  while (in >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("malformed record field: " + field);
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "receiver") {
      rec.receiver = value;
    } else if (key == "budget") {
      rec.budget = value == "poisson" ? BudgetMode::kPoissonN : BudgetMode::kFixedN;
    } else if (key == "N") {
      rec.photons_emitted = std::stoull(value);
    } else if (key == "seed") {
      rec.seed = std::stoull(value);
    } else if (key == "params") {
      for (const auto& tok : split(value, ',')) rec.params.push_back(std::stod(tok));
    } else if (key == "counts") {
      for (const auto& tok : split(value, ',')) rec.counts.push_back(std::stoull(tok));
    } else if (key == "discarded") {
      rec.discarded = std::stoull(value);
    } else if (key == "positions") {
      for (const auto& tok : split(value, ','))
        rec.positions.push_back(std::stod(tok));
    }
  }
  return rec;
}

void write_records(std::ostream& out, const std::vector<DetectionRecord>& rs) {
  for (const auto& r : rs) out << serialize_record(r) << "\n";
}

std::vector<DetectionRecord> read_records(std::istream& in) {
  std::vector<DetectionRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    out.push_back(parse_record(line));
  }
  return out;
}

}  // namespace subray
