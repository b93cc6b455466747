#include "subray/info/bounds.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace subray {

double bias_corrected_crb(double bias, double bias_derivative,
                          double fisher_information, double n_photons,
                          double /*theta*/) {
  if (!(n_photons > 0.0)) throw std::invalid_argument("N must be > 0");
  if (fisher_information < 0.0)
    throw std::invalid_argument("Fisher information must be >= 0");
  const double slope = 1.0 + bias_derivative;
  if (fisher_information == 0.0)
    return slope == 0.0 ? bias * bias
                        : std::numeric_limits<double>::infinity();
  return slope * slope / (n_photons * fisher_information) + bias * bias;
}

double van_trees_bound(double prior_info, double mean_fisher_information,
                       double n_photons) {
  if (prior_info < 0.0 || mean_fisher_information < 0.0)
    throw std::invalid_argument("information terms must be >= 0");
  const double denom = n_photons * mean_fisher_information + prior_info;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / denom;
}

double modified_fi_relative(double fisher_information, double theta) {
  if (!(theta > 0.0))
    throw std::invalid_argument(
        "relative error is undefined at theta = 0");
  return theta * theta * fisher_information;
}

namespace {

void append_value(std::ostringstream& out, const std::vector<double>& column,
                  size_t i) {
  out << ",";
  if (i >= column.size() || std::isnan(column[i])) {
    out << "nan";
  } else if (std::isinf(column[i])) {
    out << (column[i] > 0 ? "inf" : "-inf");
  } else {
    out << column[i];
  }
}

}  // namespace

std::string BoundReport::to_delimited() const {
  std::ostringstream out;
  out.precision(9);
  out << std::scientific;
  for (const auto& line : provenance) out << "# " << line << "\n";
  out << "# N=" << n_photons << "\n";
  out << "theta,crb_direct,crb_receiver,qcrb,bias_corrected,van_trees\n";
  for (size_t i = 0; i < theta.size(); ++i) {
    out << theta[i];
    append_value(out, crb_direct, i);
    append_value(out, crb_receiver, i);
    append_value(out, qcrb, i);
    append_value(out, bias_corrected, i);
    append_value(out, van_trees, i);
    out << "\n";
  }
  return out.str();
}

}  // namespace subray
