#include "residua/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <fmt/format.h>

#include "residua/csv.hpp"
#include "residua/error.hpp"
#include "residua/parallel.hpp"
#include "residua/rng.hpp"

namespace residua {

BigFloat m_choice_lhs(double c, std::uint64_t d, std::size_t r, std::uint64_t m) {
  using boost::multiprecision::exp;
  using boost::multiprecision::log;
  const BigFloat bm(m);
  const BigFloat inner = log(BigFloat(c)) + BigFloat(d) * log(2 * bm * BigFloat(r));
  return exp(BigFloat(3) / (4 * bm) * inner);
}

std::uint64_t choose_m(double c, std::uint64_t d, std::size_t r, double eps) {
  if (!(c >= 1.0) || d < 1 || r < 1 || !(eps > 0.0)) throw InvalidArgument("choose_m needs C >= 1, D >= 1, R >= 1, eps > 0");
  const BigFloat target = 1 + BigFloat(eps) / 3;
  auto ok = [&](std::uint64_t m) { return m_choice_lhs(c, d, r, m) <= target; };
  // The left side is nonincreasing in m, so double then bisect.
  std::uint64_t hi = 1;
  while (!ok(hi)) {
    if (hi > (std::uint64_t{1} << 62)) throw InvariantViolation("choose_m did not terminate");
    hi *= 2;
  }
  std::uint64_t lo = hi / 2;  // fails (or 0)
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

bool CsrfCertificate::all_slack_nonnegative() const {
  return std::all_of(rows.begin(), rows.end(), [](const CertificateRow& r) { return r.final_slack >= 0.0; });
}

CsrfCertificate certify(const Tower& tower, const Subgroup& y, std::size_t radius, double epsilon,
                        const std::vector<AlgebraElement>& elements, const CertifyOptions& options) {
  if (radius < 1) throw InvalidArgument("radius must be at least 1");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (options.max_power < 1 || options.fit_radius < 1) throw InvalidArgument("max_power and fit_radius must be positive");
  if (elements.empty()) throw InvalidArgument("no elements to certify");
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& a = elements[i];
    if (!(a.context().basis == y.names)) throw ContextMismatch(fmt::format("element {} is not over the subgroup generators", i));
    if (a.is_matrix()) throw InvalidArgument(fmt::format("element {} has matrix coefficients", i));
    if (std::abs(l1(a) - 1.0) > 1e-9) throw InvalidArgument(fmt::format("element {} has l1 norm {}, expected 1", i, l1(a)));
    if (max_word_length(a) > radius) {
      throw InvalidArgument(fmt::format("element {} is not supported in B_Y({})", i, radius));
    }
  }

  CsrfCertificate cert;
  cert.radius = radius;
  cert.epsilon = epsilon;
  cert.d = degree(tower);
  cert.c_meas = 1.0;
  for (std::size_t r = 1; r <= options.fit_radius; ++r) {
    const Discrimination probe = discriminating_hom(tower, y, r, options.discriminate);
    cert.fit.push_back({r, probe.stretch});
    cert.c_meas = std::max(cert.c_meas, static_cast<double>(probe.stretch) / std::pow(static_cast<double>(r),
                                                                                        static_cast<double>(cert.d)));
  }
  cert.m = choose_m(cert.c_meas, cert.d, radius, epsilon);
  cert.lhs_at_m = m_choice_lhs(cert.c_meas, cert.d, radius, cert.m).str(20);
  cert.lhs_at_m_minus_1 = cert.m > 1 ? m_choice_lhs(cert.c_meas, cert.d, radius, cert.m - 1).str(20) : "";
  cert.required_radius = 2 * cert.m * radius;
  cert.max_power = static_cast<std::size_t>(std::min<std::uint64_t>(cert.m, options.max_power));
  cert.certified_radius = 2 * cert.max_power * radius;

  const Discrimination phi = discriminating_hom(tower, y, cert.certified_radius, options.discriminate);
  cert.level_m = phi.m;
  cert.stretch = phi.stretch;
  cert.ball_elements = phi.elements;

  std::vector<std::vector<CertificateRow>> per_element(elements.size());
  parallel_for(elements.size(), [&](std::size_t i) {
    const AlgebraElement& a = elements[i];
    const AlgebraElement b = pushforward(phi.hom, a);
    const AlgebraElement c1 = convolve(star(b), b);
    AlgebraElement c = c1;
    for (std::size_t j = 1; j <= cert.max_power; ++j) {
      if (j > 1) c = convolve(c, c1);
      CertificateRow row;
      row.element = i;
      row.j = j;
      row.l2_element = l2(a);
      row.l2_of_power = l2(c);
      row.radius = max_word_length(c);
      row.haagerup_factor = std::pow(static_cast<double>(row.radius) + 1.0, 1.5);
      row.l1 = l1(a);
      const double two_j = 2.0 * static_cast<double>(j);
      row.proxy = std::pow(row.l2_of_power, 1.0 / two_j);
      row.norm_upper_free = std::min(row.l1, std::pow(row.haagerup_factor * row.l2_of_power, 1.0 / two_j));
      row.final_slack = row.proxy + epsilon - row.norm_upper_free;
      per_element[i].push_back(row);
    }
  });
  for (auto& rows : per_element) {
    for (auto& r : rows) cert.rows.push_back(r);
  }
  for (const auto& r : cert.rows) {
    const double tol = 1e-12;
    if (r.l2_element > r.proxy * (1 + tol) + tol || r.proxy > r.norm_upper_free * (1 + tol) + tol ||
        r.norm_upper_free > r.l1 * (1 + tol)) {
      throw InvariantViolation(fmt::format("chain out of order for element {} at j = {}", r.element, r.j));
    }
  }
  return cert;
}

namespace {

constexpr std::string_view kSlackNote =
    "final_slack is measured against the computable proxy l2((a*a)^j)^(1/2j), a lower bound for "
    "||lambda_Gamma(a)||; it is not a statement about ||lambda_Gamma(a)|| itself";

}  // namespace

std::string certificate_document(const CsrfCertificate& cert) {
  Document doc;
  auto& root = doc.root();
  root.add("note", DocValue::string(std::string(kSlackNote)));
  root.add("radius", DocValue::integer_value(static_cast<std::int64_t>(cert.radius)));
  root.add("epsilon", DocValue::real_value(cert.epsilon));
  root.add("m", DocValue::integer_value(static_cast<std::int64_t>(cert.m)));
  root.add("C_meas", DocValue::real_value(cert.c_meas));
  root.add("D", DocValue::integer_value(static_cast<std::int64_t>(cert.d)));
  root.add("m_choice_lhs", DocValue::string(cert.lhs_at_m));
  root.add("m_choice_lhs_at_m_minus_1", DocValue::string(cert.lhs_at_m_minus_1));
  root.add("required_radius", DocValue::integer_value(static_cast<std::int64_t>(cert.required_radius)));
  root.add("certified_radius", DocValue::integer_value(static_cast<std::int64_t>(cert.certified_radius)));
  root.add("max_power", DocValue::integer_value(static_cast<std::int64_t>(cert.max_power)));
  std::vector<DocValue> level_m;
  for (auto v : cert.level_m) level_m.push_back(DocValue::integer_value(v));
  root.add("level_m", DocValue::array(std::move(level_m)));
  root.add("stretch", DocValue::integer_value(static_cast<std::int64_t>(cert.stretch)));
  root.add("ball_elements", DocValue::integer_value(static_cast<std::int64_t>(cert.ball_elements)));
  root.add("all_slack_nonnegative", DocValue::boolean_value(cert.all_slack_nonnegative()));
  for (const auto& f : cert.fit) {
    auto& t = doc.add_table("fit", true);
    t.add("radius", DocValue::integer_value(static_cast<std::int64_t>(f.radius)));
    t.add("stretch", DocValue::integer_value(static_cast<std::int64_t>(f.stretch)));
  }
  for (const auto& r : cert.rows) {
    auto& t = doc.add_table("row", true);
    t.add("element", DocValue::integer_value(static_cast<std::int64_t>(r.element)));
    t.add("j", DocValue::integer_value(static_cast<std::int64_t>(r.j)));
    t.add("l2_element", DocValue::real_value(r.l2_element));
    t.add("l2_of_power", DocValue::real_value(r.l2_of_power));
    t.add("support_radius", DocValue::integer_value(static_cast<std::int64_t>(r.radius)));
    t.add("haagerup_factor", DocValue::real_value(r.haagerup_factor));
    t.add("norm_upper_free", DocValue::real_value(r.norm_upper_free));
    t.add("proxy", DocValue::real_value(r.proxy));
    t.add("l1", DocValue::real_value(r.l1));
    t.add("final_slack", DocValue::real_value(r.final_slack));
  }
  return format_document(doc);
}

std::string certificate_csv(const CsrfCertificate& cert) {
  std::string out = fmt::format("{}\n# {}\n", kCsvVersionLine, kSlackNote);
  out += "element,j,l2_element,l2_of_power,support_radius,haagerup_factor,norm_upper_free,proxy,l1,final_slack\n";
  for (const auto& r : cert.rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.element, r.j, format_real(r.l2_element),
                       format_real(r.l2_of_power), r.radius, format_real(r.haagerup_factor),
                       format_real(r.norm_upper_free), format_real(r.proxy), format_real(r.l1),
                       format_real(r.final_slack));
  }
  return out;
}

std::uint64_t net_grid(double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  return static_cast<std::uint64_t>(std::ceil(6.0 / epsilon));
}

std::vector<AlgebraElement> net_mode(const Context& context, const std::vector<Word>& support, double epsilon,
                                     std::size_t phase_samples, std::uint64_t seed) {
  if (support.empty()) throw InvalidArgument("net support is empty");
  if (support.size() > 3) throw InvalidArgument("net mode supports at most 3 support elements");
  for (std::size_t i = 0; i < support.size(); ++i) {
    for (std::size_t j = i + 1; j < support.size(); ++j) {
      if (support[i] == support[j]) throw InvalidArgument("net support has repeated words");
    }
  }
  const std::uint64_t k = net_grid(epsilon);
  std::vector<std::vector<std::uint64_t>> points;
  std::vector<std::uint64_t> current(support.size(), 0);
  // Compositions of k into support.size() nonnegative parts, lexicographic.
  auto recurse = [&](auto&& self, std::size_t pos, std::uint64_t left) -> void {
    if (pos + 1 == support.size()) {
      current[pos] = left;
      points.push_back(current);
      return;
    }
    for (std::uint64_t v = 0; v <= left; ++v) {
      current[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  recurse(recurse, 0, k);

  std::vector<AlgebraElement> net;
  auto build = [&](const std::vector<std::uint64_t>& p, const std::vector<Complex>& phases) {
    std::vector<std::pair<Word, Complex>> terms;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == 0) continue;
      terms.emplace_back(support[i], phases[i] * (static_cast<double>(p[i]) / static_cast<double>(k)));
    }
    return AlgebraElement::from_terms(context, std::move(terms));
  };
  const std::vector<Complex> ones(support.size(), 1.0);
  for (const auto& p : points) net.push_back(build(p, ones));
  const CounterRng root(seed);
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    CounterRng rng = root.split(pi);
    for (std::size_t s = 0; s < phase_samples; ++s) {
      std::vector<Complex> phases;
      for (std::size_t i = 0; i < support.size(); ++i) {
        phases.push_back(std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform01()));
      }
      net.push_back(build(points[pi], phases));
    }
  }
  return net;
}

}  // namespace residua
