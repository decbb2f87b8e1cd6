#include "residua/csv.hpp"

#include <cmath>

#include <fmt/format.h>

namespace residua {

std::string csv_preamble(std::string_view columns) {
  return fmt::format("{}\n{}\n", kCsvVersionLine, columns);
}

std::string format_real(double x) { return fmt::format("{:.17g}", x + 0.0); }  // + 0.0 drops "-0"

std::string format_from_log(double log_value) {
  if (std::isinf(log_value) && log_value < 0) return "0";
  if (log_value < 700.0 && log_value > -700.0) return format_real(std::exp(log_value));
  const double log10v = log_value / std::log(10.0);
  const double exponent = std::floor(log10v);
  return fmt::format("{:.15g}e{:+.0f}", std::pow(10.0, log10v - exponent), exponent);
}

}  // namespace residua
