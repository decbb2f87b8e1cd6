#pragma once

#include <string>
#include <string_view>

namespace residua {

inline constexpr std::string_view kCsvVersionLine = "# residua-csv v1";

/// Version comment line followed by the column header line.
std::string csv_preamble(std::string_view columns);
/// Round-trippable decimal form of a double.
std::string format_real(double x);
/// exp(log_value) in decimal, falling back to mantissa/exponent text when the
/// value does not fit in a double.
std::string format_from_log(double log_value);

}  // namespace residua
