#pragma once

// End-to-end certificates for the inequality chain
//   ||lambda_F(phi(a))||^{2j} <= (R_j + 1)^{3/2} l2((b*b)^j),   b = phi(a),
// with the right-hand side transferred back to the subgroup through the
// injectivity of phi on B_Y(2jR).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "residua/algebra.hpp"
#include "residua/bigfloat.hpp"
#include "residua/towerfile.hpp"

namespace residua {

/// [C (2 m R)^D]^{3/(4m)} evaluated in extended precision.
BigFloat m_choice_lhs(double c, std::uint64_t d, std::size_t r, std::uint64_t m);
/// Smallest m >= 1 with m_choice_lhs(C, D, R, m) <= 1 + eps/3.
std::uint64_t choose_m(double c, std::uint64_t d, std::size_t r, double eps);

struct CertifyOptions {
  /// Largest j for which (b*b)^j is evaluated; phi is certified on B_Y(2 j R).
  std::size_t max_power = 2;
  /// Stretch is measured for radii 1..fit_radius to fit C.
  std::size_t fit_radius = 3;
  DiscriminateOptions discriminate;
};

struct FitPoint {
  std::size_t radius = 0;
  std::size_t stretch = 0;
};

struct CertificateRow {
  std::size_t element = 0;
  std::size_t j = 0;
  double l2_element = 0.0;
  /// l2((b*b)^j), equal to l2((a*a)^j) by injectivity.
  double l2_of_power = 0.0;
  std::size_t radius = 0;
  /// (R_j + 1)^{3/2}.
  double haagerup_factor = 0.0;
  /// [factor * l2]^{1/(2j)} capped by l1.
  double norm_upper_free = 0.0;
  /// l2((a*a)^j)^{1/(2j)}, a lower bound for ||lambda_Gamma(a)||.
  double proxy = 0.0;
  double l1 = 0.0;
  /// proxy + eps - norm_upper_free.
  double final_slack = 0.0;
};

struct CsrfCertificate {
  std::size_t radius = 0;
  double epsilon = 0.0;
  std::uint64_t m = 0;
  double c_meas = 0.0;
  std::uint64_t d = 0;
  std::vector<FitPoint> fit;
  std::string lhs_at_m;
  std::string lhs_at_m_minus_1;
  std::uint64_t required_radius = 0;
  std::size_t certified_radius = 0;
  std::size_t max_power = 0;
  std::vector<std::int64_t> level_m;
  std::size_t stretch = 0;
  std::size_t ball_elements = 0;
  std::vector<CertificateRow> rows;

  bool all_slack_nonnegative() const;
};

CsrfCertificate certify(const Tower& tower, const Subgroup& y, std::size_t radius, double epsilon,
                        const std::vector<AlgebraElement>& elements, const CertifyOptions& options = {});

/// Certificate as a structured document (tower file dialect) and as CSV rows.
std::string certificate_document(const CsrfCertificate& cert);
std::string certificate_csv(const CsrfCertificate& cert);

/// The real nonnegative unit-l1 elements with weights in (1/K) Z, K = ceil(6/eps),
/// followed by `phase_samples` randomly phased copies of each. Support size <= 3.
std::vector<AlgebraElement> net_mode(const Context& context, const std::vector<Word>& support, double epsilon,
                                     std::size_t phase_samples, std::uint64_t seed);
/// ceil(6/eps).
std::uint64_t net_grid(double epsilon);

}  // namespace residua
