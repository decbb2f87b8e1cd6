#include "residua/normbracket.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <fmt/format.h>

#include "residua/csv.hpp"
#include "residua/error.hpp"
#include "residua/radial.hpp"

namespace residua {

namespace {

constexpr std::string_view kFloatDisclaimer =
    "double precision, no directed rounding: bounds hold up to floating-point error";

// c_j normalised to unit l2, either word-level or radial.
struct Power {
  std::optional<AlgebraElement> words;
  std::optional<RadialElement> radial;

  // ||lambda(c)(delta_e (x) v)|| maximised over unit v; the l2 norm for scalars.
  double lower_norm() const { return radial ? radial_l2(*radial) : column_l2(*words); }
  double frobenius() const { return radial ? radial_l2(*radial) : l2(*words); }
  std::size_t radius() const { return radial ? radial_radius(*radial) : max_word_length(*words); }
  void scale(double f) {
    if (radial) *radial = radial_scaled(*radial, f);
    else *words = words->scaled(f);
  }
  void square(std::uint64_t cap) {
    if (radial) *radial = radial_convolve(*radial, *radial);
    else *words = convolve(*words, *words, cap);
  }
};

}  // namespace

NormBracket sandwich(const AlgebraElement& a, const SandwichOptions& options) {
  if (a.is_zero()) throw InvalidArgument("sandwich of the zero element");
  if (a.context().kind != GroupKind::Free) throw ContextMismatch("sandwich needs a free context");
  if (options.max_doublings < 1) throw InvalidArgument("max_doublings must be at least 1");

  NormBracket out;
  out.l1_cap = l1(a);
  out.heuristic = a.is_matrix();
  out.disclaimer = std::string(kFloatDisclaimer);
  if (out.heuristic) out.disclaimer += "; matrix mode upper bound is heuristic";

  // Work with a / l1(a) and track the scale in logs: c_j = exp(log_scale) * power.
  const double inv = 1.0 / out.l1_cap;
  Power power;
  std::optional<RadialElement> radial = options.allow_radial ? as_radial(a) : std::nullopt;
  if (radial) {
    auto unit = radial_scaled(*radial, inv);
    power.radial = radial_convolve(radial_star(unit), unit);
    out.radial = true;
  } else {
    auto unit = a.scaled(inv);
    power.words = convolve(star(unit), unit, options.term_cap);
  }
  double log_scale = 2.0 * std::log(out.l1_cap);

  double best_lower = 0.0;
  double best_upper = out.l1_cap;
  for (std::size_t j = 1; j <= options.max_doublings; ++j) {
    const std::uint64_t m = std::uint64_t{1} << (j - 1);
    const double norm = power.lower_norm();
    const double log_l2 = log_scale + std::log(power.frobenius());
    const double log_lower = log_scale + std::log(norm);
    const std::size_t radius = power.radius();
    const double two_m = 2.0 * static_cast<double>(m);

    ScheduleRow row;
    row.j = j;
    row.m = m;
    row.log_l2 = log_l2;
    row.radius = radius;
    row.raw_lower = std::exp(log_lower / two_m);
    row.raw_upper = std::exp((1.5 * std::log(static_cast<double>(radius) + 1.0) + log_l2) / two_m);
    if (!out.schedule.empty()) {
      const double prev = out.schedule.back().raw_lower;
      if (row.raw_lower < prev * (1.0 - 1e-9)) {
        throw InvariantViolation(
            fmt::format("lower bound decreased from {} to {} at j = {}", prev, row.raw_lower, j));
      }
    }
    best_lower = std::max(best_lower, row.raw_lower);
    best_upper = std::min(best_upper, row.raw_upper);
    row.lower = best_lower;
    row.upper = best_upper;
    out.schedule.push_back(row);

    if (best_upper <= options.target_ratio * best_lower || j == options.max_doublings) break;

    power.scale(1.0 / norm);
    log_scale = 2.0 * log_lower;
    try {
      power.square(options.term_cap);
    } catch (const SizeLimitError&) {
      out.truncated = true;
      break;
    }
  }
  out.lower = best_lower;
  if (best_upper < best_lower * (1.0 - 1e-9)) {
    throw InvariantViolation(fmt::format("upper bound {} below lower bound {}", best_upper, best_lower));
  }
  out.upper = std::max(best_upper, best_lower);
  return out;
}

std::string bracket_report(const NormBracket& bracket) {
  std::string out = csv_preamble("j,m,l2,radius,lower,upper");
  for (const auto& row : bracket.schedule) {
    out += fmt::format("{},{},{},{},{},{}\n", row.j, row.m, format_from_log(row.log_l2), row.radius,
                       format_real(row.lower), format_real(row.upper));
  }
  return out;
}

}  // namespace residua
