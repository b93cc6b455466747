#include "subray/io/csv.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace subray {

std::uint64_t config_hash(const std::string& canonical_config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical_config) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<double> parse_grid(const std::string& spec, bool log_spaced) {
  const auto first = spec.find(':');
  const auto second = spec.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw std::invalid_argument("grid spec must be start:stop:count");
  const double start = std::stod(spec.substr(0, first));
  const double stop = std::stod(spec.substr(first + 1, second - first - 1));
  const long count = std::stol(spec.substr(second + 1));
  if (count < 1) throw std::invalid_argument("grid count must be >= 1");
  if (log_spaced && (start <= 0.0 || stop <= 0.0))
    throw std::invalid_argument("log grid requires positive endpoints");
  std::vector<double> grid;
  grid.reserve(count);
  if (count == 1) {
    grid.push_back(start);
    return grid;
  }
  for (long i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    grid.push_back(log_spaced
                       ? std::exp(std::log(start) +
                                  t * (std::log(stop) - std::log(start)))
                       : start + t * (stop - start));
  }
  return grid;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out.precision(8);  // 9 significant digits in scientific notation
  out << std::scientific << v;
  return out.str();
}

CsvWriter::CsvWriter(std::string path, const std::string& canonical_config,
                     std::uint64_t seed)
    : path_(std::move(path)), config_(canonical_config), seed_(seed) {}

void CsvWriter::set_columns(const std::vector<std::string>& names) {
  columns_ = names;
}

void CsvWriter::add_row(const std::vector<double>& values) {
  if (values.size() != columns_.size())
    throw std::invalid_argument("row width does not match columns");
  rows_.push_back(values);
}

void CsvWriter::add_comment(const std::string& line) {
  comments_.push_back(line);
}

std::string CsvWriter::render() const {
  std::ostringstream out;
  out << "# tool subray " << kToolVersion << "\n";
  out << "# config " << config_ << "\n";
  out << "# config_hash " << std::hex << config_hash(config_) << std::dec
      << "\n";
  out << "# seed " << seed_ << "\n";
  for (const auto& c : comments_) out << "# " << c << "\n";
  for (size_t i = 0; i < columns_.size(); ++i)
    out << (i ? "," : "") << columns_[i];
  out << "\n";
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_number(row[i]);
    out << "\n";
  }
  return out.str();
}

void CsvWriter::write() const {
  std::ofstream out(path_, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path_);
  out << render();
}

}  // namespace subray
