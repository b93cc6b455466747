#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace subray {

inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a hash of the canonical config string, printed in output headers so
/// runs are attributable to their exact configuration.
std::uint64_t config_hash(const std::string& canonical_config);

/// Parses "start:stop:count", linearly or log-spaced. count >= 1; count == 1
/// yields {start}.
std::vector<double> parse_grid(const std::string& spec, bool log_spaced);

/// Plot-ready CSV with a provenance header. Numbers print with 9 significant
/// digits in scientific notation; non-finite values print as "inf"/"-inf"/
/// "nan" sentinels.
class CsvWriter {
 public:
  CsvWriter(std::string path, const std::string& canonical_config,
            std::uint64_t seed);
  void set_columns(const std::vector<std::string>& names);
  void add_row(const std::vector<double>& values);
  /// Extra "# key value" header line (written before the column row).
  void add_comment(const std::string& line);
  void write() const;
  std::string render() const;

 private:
  std::string path_;
  std::string config_;
  std::uint64_t seed_;
  std::vector<std::string> comments_;
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

std::string format_number(double v);

}  // namespace subray
