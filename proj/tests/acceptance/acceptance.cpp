// Acceptance run: one PASS/FAIL line per criterion.
//
//   residua_acceptance [--only 1,4,...] [--known-failure 5,...]
//
// Exit status is nonzero when a criterion fails that is not listed as a known
// failure. Known failures still print FAIL.

#include <sys/resource.h>

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "residua/baumslag.hpp"
#include "residua/normbracket.hpp"
#include "residua/permrep.hpp"
#include "residua/pipeline.hpp"
#include "residua/radial.hpp"
#include "residua/torus.hpp"
#include "residua/tower.hpp"

using namespace residua;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double peak_rss_gb() {
  rusage u{};
  getrusage(RUSAGE_SELF, &u);
  return static_cast<double>(u.ru_maxrss) / (1024.0 * 1024.0);
}

// Closed walks of each length from the root of the 4-regular tree.
std::vector<double> tree_walks(std::size_t max_len) {
  std::vector<double> f(max_len + 2, 0.0), out(max_len + 1, 0.0);
  f[0] = out[0] = 1.0;
  for (std::size_t s = 1; s <= max_len; ++s) {
    std::vector<double> g(max_len + 2, 0.0);
    for (std::size_t d = 0; d <= s && d <= max_len; ++d) {
      if (d == 0) {
        g[1] += 4.0 * f[0];
      } else {
        g[d - 1] += f[d];
        g[d + 1] += 3.0 * f[d];
      }
    }
    f = std::move(g);
    out[s] = f[0];
  }
  return out;
}

const Context F2 = Context::free(Basis::parse("a,b"));
const AlgebraElement kesten = parse_element(F2, "1 0 a\n1 0 a^-1\n1 0 b\n1 0 b^-1\n");

NormBracket kesten_bracket() { return sandwich(kesten, {8}); }

SearchReport baumslag_run() {
  SearchBounds b;
  b.n_max = 3;
  b.u_len = 4;
  b.b_len = 6;
  return search_counterexamples(1, b, 100000);
}

ExperimentResult permrep_run() {
  const Preset p = preset_genus2();
  const auto z = parse_element(Context::presented(p.subgroup.names), "1 0 a\n1 0 b\n1 0 c\n1 0 d\n");
  ExperimentConfig c;
  c.sizes = {100, 400, 1600};
  c.seeds = {1, 2, 3, 4, 5};
  c.radius = 2;
  return strong_convergence_experiment(p.tower, p.subgroup, z, c);
}

CsrfCertificate certificate_run() {
  const Preset p = preset_genus2();
  const auto a = parse_element(Context::presented(p.subgroup.names), "0.25 0 a\n0.25 0 b\n0.25 0 c\n0.25 0 d\n");
  return certify(p.tower, p.subgroup, 1, 0.5, {a});
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const NormBracket b = kesten_bracket();
  const double secs = seconds_since(t0);
  const double target = 3.4641;
  bool monotone = true;
  for (std::size_t i = 1; i < b.schedule.size(); ++i) monotone &= b.schedule[i].lower >= b.schedule[i - 1].lower;
  // Oracle: c^{4m}(e) from the closed-walk recursion against radial convolution powers.
  const auto walks = tree_walks(32);
  const auto r = *as_radial(kesten);
  RadialElement q = r;
  double worst = 0.0;
  for (std::size_t m = 1; m <= 8; ++m) {
    while (radial_radius(q) < 2 * m) q = radial_convolve(q, r);
    const double n2 = radial_l2(q);
    worst = std::max(worst, std::abs(n2 * n2 - walks[4 * m]) / walks[4 * m]);
  }
  const double mem = peak_rss_gb();
  const bool pass = b.schedule.size() == 8 && b.lower >= 3.0 && b.upper <= 4.1 && b.lower <= target &&
                    target <= b.upper && monotone && worst <= 1e-6 && secs < 120 && mem < 4.0;
  return {pass, fmt::format("lower={:.6f} upper={:.6f} oracle_rel_err={:.2e} time={:.2f}s rss={:.3f}GB", b.lower,
                            b.upper, worst, secs, mem)};
}

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const Preset p = preset_genus2();
  const Discrimination d = discriminating_hom(p.tower, p.subgroup, 3);
  const auto ywords = ball(4, 3);
  std::set<Word> images;
  for (const auto& y : ywords) images.insert(d.hom.apply(y));
  // Height-1 equality versus image equality on every pair.
  const Homomorphism inc = p.subgroup.inclusion(p.tower);
  std::vector<Word> t, img;
  for (const auto& y : ywords) {
    t.push_back(inc.apply(y));
    img.push_back(d.hom.apply(y));
  }
  std::size_t disagreements = 0, pairs = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      ++pairs;
      disagreements += equal_h1(p.tower, t[i], t[j]) != (img[i] == img[j]);
    }
  }
  const double secs = seconds_since(t0);
  // (8r^2+4r) d_Y(2(r+|a|))^2 with d_Y(x) = x at height 0, r = 3, |a| = 4.
  const double formula = (8.0 * 9 + 12) * 14.0 * 14.0;
  const bool pass = images.size() == ywords.size() && static_cast<double>(d.stretch) <= formula &&
                    disagreements == 0 && secs < 60;
  return {pass, fmt::format("ball={} distinct={} stretch={} bound={} pairs={} disagreements={} time={:.2f}s",
                            ywords.size(), images.size(), d.stretch, formula, pairs, disagreements, secs)};
}

Outcome criterion3() {
  bool pass = true;
  for (std::size_t n = 0; n <= 6; ++n) {
    pass &= degree(n) == (std::uint64_t{1} << (n + 2)) - (std::uint64_t{1} << n) - 2;
    pass &= degree(n + 1) == 2 * degree(n) + 2;
  }
  return {pass, fmt::format("degree(0..6)={},{},{},{},{},{},{}", degree(0), degree(1), degree(2), degree(3),
                            degree(4), degree(5), degree(6))};
}

Outcome criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const SearchReport r = baumslag_run();
  const SweepReport s = exhaustive_n0(2, 3, 4, 60);
  const double secs = seconds_since(t0);
  const bool pass = r.rows.size() == 100000 && r.violations.empty() && s.violations.empty() && secs < 60;
  return {pass, fmt::format("random={} violations={} sweep={} violations={} time={:.2f}s", r.rows.size(),
                            r.violations.size(), s.instances, s.violations.size(), secs)};
}

Outcome criterion5() {
  const ExperimentResult e = permrep_run();
  std::vector<double> medians;
  std::size_t within = 0;
  for (std::size_t n : {100, 400, 1600}) {
    std::vector<double> v;
    for (const auto& row : e.rows) {
      if (row.n != n) continue;
      v.push_back(row.op_norm);
      if (n == 1600 && row.op_norm <= e.reference.upper + 0.3) ++within;
    }
    std::sort(v.begin(), v.end());
    medians.push_back(v[v.size() / 2]);
  }
  const bool monotone = medians[1] <= medians[0] && medians[2] <= medians[1];
  const bool pass = monotone && within >= 4;
  return {pass, fmt::format("medians={:.6f},{:.6f},{:.6f} nonincreasing={} within_upper+0.3={}/5 upper={:.4f}",
                            medians[0], medians[1], medians[2], monotone ? "yes" : "no", within, e.reference.upper)};
}

// Largest singular value on the mean-zero subspace by Gram repeated squaring.
double dense_norm(const AlgebraElement& z, const PermRep& rep) {
  const auto n = static_cast<Eigen::Index>(rep.degree);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t t = 0; t < z.size(); ++t) {
    const Permutation p = rep.evaluate(z.support()[t]);
    for (Eigen::Index i = 0; i < n; ++i) m(i, static_cast<Eigen::Index>(p[static_cast<std::size_t>(i)])) += z.coefficient(t)[0];
  }
  const Eigen::MatrixXcd q =
      Eigen::MatrixXcd::Identity(n, n) - Eigen::MatrixXcd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::MatrixXcd g = (m * q).adjoint() * (m * q);
  double log_scale = 0.0;
  for (int k = 0; k < 45; ++k) {
    g = g * g;
    const double c = g.norm();
    if (c == 0.0) return 0.0;
    g /= c;
    log_scale = 2.0 * log_scale + std::log(c);
  }
  return std::sqrt(std::exp((std::log(g.trace().real()) + log_scale) / std::ldexp(1.0, 45)));
}

Outcome criterion6() {
  CounterRng rng(2024);
  const auto words = ball(2, 2);
  double worst = 0.0;
  for (int pair = 0; pair < 50; ++pair) {
    std::vector<std::pair<Word, Complex>> terms;
    const std::size_t k = 1 + rng.below(6);
    for (std::size_t i = 0; i < k; ++i) {
      terms.emplace_back(words[rng.below(words.size())], Complex(rng.uniform01() - 0.5, rng.uniform01() - 0.5));
    }
    const auto z = AlgebraElement::from_terms(F2, terms);
    const auto rep = random_free_rep(F2.basis, 2 + rng.below(29), 7000 + pair);
    OpNormOptions o;
    o.tol = 1e-15;
    o.max_iters = 200000;
    const double got = op_norm(z, rep, o).value;
    const double expect = dense_norm(z, rep);
    worst = std::max(worst, expect == 0.0 ? got : std::abs(got - expect) / expect);
  }
  return {worst <= 1e-6, fmt::format("pairs=50 max_rel_err={:.2e}", worst)};
}

Outcome criterion7() {
  ZrElement two;
  two.coeffs[{0}] = 1.0;
  two.coeffs[{1}] = 1.0;
  bool exact = true;
  for (std::uint64_t q = 1; q <= 512; ++q) exact &= zr_norm(two, q) == 2.0;
  const double residual = klein_relation_residual(64);

  CounterRng rng(77);
  double worst_zr = 0.0, worst_klein = 0.0, worst_push = 0.0;
  for (int i = 0; i < 20; ++i) {
    ZrElement z;
    z.rank = 2;
    KleinElement k, ka;
    for (int t = 0; t < 6; ++t) {
      const auto x = static_cast<std::int64_t>(rng.below(7)) - 3;
      const auto y = static_cast<std::int64_t>(rng.below(7)) - 3;
      const Complex c(rng.uniform01() - 0.5, rng.uniform01() - 0.5);
      z.coeffs[{x, y}] += c;
      k.coeffs[{x, y}] += c;
      ka.coeffs[{x, 0}] += c;
    }
    worst_zr = std::max(worst_zr, std::abs(zr_norm(z, 128) - zr_norm(z, 256)));
    worst_klein = std::max(worst_klein, std::abs(klein_norm(k, 128) - klein_norm(k, 256)));
    worst_push = std::max(worst_push, std::abs(klein_norm(ka, 128) - zr_norm(pushdown(ka), 128)));
  }
  const bool pass = exact && residual <= 1e-12 && worst_zr <= 0.05 && worst_klein <= 0.05 && worst_push <= 1e-9;
  return {pass, fmt::format("exact2={} residual={:.1e} refine_zr={:.2e} refine_klein={:.2e} pushdown={:.1e}",
                            exact ? "yes" : "no", residual, worst_zr, worst_klein, worst_push)};
}

Outcome criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  const CsrfCertificate c = certificate_run();
  const double secs = seconds_since(t0);
  const BigFloat limit = 1 + BigFloat(c.epsilon) / 3;
  const bool m_ok = m_choice_lhs(c.c_meas, c.d, c.radius, c.m) <= limit &&
                    (c.m == 1 || m_choice_lhs(c.c_meas, c.d, c.radius, c.m - 1) > limit);
  double min_slack = 1e300;
  for (const auto& row : c.rows) min_slack = std::min(min_slack, row.final_slack);
  const bool pass = c.all_slack_nonnegative() && m_ok && secs < 120;
  return {pass, fmt::format("m={} C_meas={} min_slack={:.6f} m_choice={} time={:.2f}s", c.m, c.c_meas, min_slack,
                            m_ok ? "ok" : "bad", secs)};
}

Outcome criterion9() {
  const bool c1 = bracket_report(kesten_bracket()) == bracket_report(kesten_bracket());
  const bool c4 = search_csv(baumslag_run()) == search_csv(baumslag_run());
  const bool c5 = experiment_csv(permrep_run()) == experiment_csv(permrep_run());
  const bool c8 = certificate_csv(certificate_run()) == certificate_csv(certificate_run());
  return {c1 && c4 && c5 && c8, fmt::format("identical: c1={} c4={} c5={} c8={}", c1, c4, c5, c8)};
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.insert(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only, known;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--only") only = parse_list(argv[i + 1]);
    else if (flag == "--known-failure") known = parse_list(argv[i + 1]);
    else {
      std::fprintf(stderr, "usage: %s [--only LIST] [--known-failure LIST]\n", argv[0]);
      return 2;
    }
  }
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3,
                                                          criterion4, criterion5, criterion6,
                                                          criterion7, criterion8, criterion9};
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool is_known = known.count(id) > 0;
    std::printf("%s %d %s%s\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(),
                !o.pass && is_known ? " (known failure)" : "");
    std::fflush(stdout);
    if (!o.pass && !is_known) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
