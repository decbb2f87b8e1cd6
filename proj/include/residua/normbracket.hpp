#pragma once

// Two-sided estimates of the reduced C*-norm ||lambda_F(a)|| for a in C[F]:
//   l2((a*a)^m)^(1/2m) <= ||lambda(a)|| <= [(R+1)^(3/2) l2((a*a)^m)]^(1/2m) <= l1(a)
// with m = 2^(j-1) reached by repeated squaring and R the support radius.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "residua/algebra.hpp"

namespace residua {

struct ScheduleRow {
  std::size_t j = 0;
  std::uint64_t m = 0;
  /// log of l2(c_j). Kept in log form because l2 itself overflows quickly.
  double log_l2 = 0.0;
  std::size_t radius = 0;
  /// Bounds from this row alone.
  double raw_lower = 0.0;
  double raw_upper = 0.0;
  /// Best bounds over rows 1..j (running max / running min capped by l1).
  double lower = 0.0;
  double upper = 0.0;
};

struct NormBracket {
  double lower = 0.0;
  double upper = 0.0;
  double l1_cap = 0.0;
  std::vector<ScheduleRow> schedule;
  /// The term cap stopped the squaring early.
  bool truncated = false;
  /// Matrix coefficients: the upper bound reuses the scalar Haagerup constant
  /// and is not certified.
  bool heuristic = false;
  /// Computed in the radial subalgebra rather than word by word.
  bool radial = false;
  std::string disclaimer;
};

struct SandwichOptions {
  std::size_t max_doublings = 8;
  /// Stop once upper / lower <= target_ratio.
  double target_ratio = 1.0;
  std::uint64_t term_cap = kDefaultTermCap;
  bool allow_radial = true;
};

NormBracket sandwich(const AlgebraElement& a, const SandwichOptions& options = {});

/// Schedule as CSV `j,m,l2,radius,lower,upper` with the version line.
std::string bracket_report(const NormBracket& bracket);

}  // namespace residua
