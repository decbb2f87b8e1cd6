#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "residua/error.hpp"
#include "residua/normbracket.hpp"
#include "residua/radial.hpp"

using namespace residua;

namespace {

const Context F2 = Context::free(Basis::parse("a,b"));
const AlgebraElement kesten = parse_element(F2, "1 0 a\n1 0 a^-1\n1 0 b\n1 0 b^-1\n");

}  // namespace

TEST_CASE("tree walk oracle reproduces convolution powers at the identity") {
  const auto walks = oracle::tree_closed_walks(2, 32);
  CHECK(walks[2] == 4.0);
  CHECK(walks[4] == 28.0);

  // Word-level powers for small exponents.
  AlgebraElement p = AlgebraElement::delta(F2, Word{});
  for (std::size_t n = 1; n <= 10; ++n) {
    p = convolve(p, kesten);
    CHECK(p.at(Word{}).real() == doctest::Approx(walks[n]).epsilon(1e-12));
  }

  // Radial powers up to c^32, read off as l2(c^{2m})^2 = c^{4m}(e) for m <= 8.
  const auto r = as_radial(kesten);
  REQUIRE(r.has_value());
  RadialElement q = *r;
  for (std::size_t m = 1; m <= 8; ++m) {
    while (radial_radius(q) < 2 * m) q = radial_convolve(q, *r);
    const double n2 = radial_l2(q);
    CHECK(n2 * n2 == doctest::Approx(walks[4 * m]).epsilon(1e-6));
  }
}

TEST_CASE("radial detection") {
  CHECK(as_radial(kesten).has_value());
  CHECK_FALSE(as_radial(parse_element(F2, "1 0 a\n1 0 b\n")).has_value());
  const auto r = *as_radial(kesten);
  const auto back = expand(r, F2);
  CHECK(l1(back - kesten) < 1e-14);
}

TEST_CASE("radial and word-level schedules agree") {
  SandwichOptions fast;
  fast.max_doublings = 3;
  SandwichOptions slow = fast;
  slow.allow_radial = false;
  const auto x = sandwich(kesten, fast);
  const auto y = sandwich(kesten, slow);
  CHECK(x.radial);
  CHECK_FALSE(y.radial);
  REQUIRE(x.schedule.size() == y.schedule.size());
  for (std::size_t i = 0; i < x.schedule.size(); ++i) {
    CHECK(x.schedule[i].raw_lower == doctest::Approx(y.schedule[i].raw_lower).epsilon(1e-12));
    CHECK(x.schedule[i].raw_upper == doctest::Approx(y.schedule[i].raw_upper).epsilon(1e-12));
    CHECK(x.schedule[i].radius == y.schedule[i].radius);
  }
}

TEST_CASE("Kesten bracket") {
  const auto walks = oracle::tree_closed_walks(2, 600);
  const auto b = sandwich(kesten);
  REQUIRE(b.schedule.size() == 8);
  const double target = 2.0 * std::sqrt(3.0);
  CHECK(b.lower <= target);
  CHECK(b.upper >= target);
  CHECK(b.lower >= 3.0);
  CHECK(b.upper <= 4.1);
  for (std::size_t i = 0; i < b.schedule.size(); ++i) {
    const auto& row = b.schedule[i];
    const double m = static_cast<double>(row.m);
    CHECK(row.radius == 2 * row.m);
    if (4 * row.m < walks.size()) {
      CHECK(row.raw_lower == doctest::Approx(std::pow(walks[4 * row.m], 1.0 / (4.0 * m))).epsilon(1e-9));
    }
    if (i > 0) CHECK(row.lower >= b.schedule[i - 1].lower);
  }
  // Frozen from the closed-walk recursion.
  CHECK(b.schedule[0].raw_lower == doctest::Approx(2.3003266337).epsilon(1e-9));
  CHECK(b.schedule[0].raw_upper == doctest::Approx(5.2436).epsilon(1e-4));
  CHECK(b.schedule[3].raw_lower == doctest::Approx(3.0662).epsilon(1e-4));
  CHECK(b.schedule[3].raw_upper == doctest::Approx(3.9991).epsilon(1e-4));
  CHECK(b.schedule[7].raw_lower == doctest::Approx(3.41164).epsilon(1e-5));
  CHECK(b.schedule[7].raw_upper == doctest::Approx(3.52439).epsilon(1e-5));
}

TEST_CASE("unitaries and commutative elements") {
  for (const char* g : {"", "a", "a b^-1 a"}) {
    const auto b = sandwich(AlgebraElement::delta(F2, parse_word(F2.basis, g)), {1});
    CHECK(b.lower == doctest::Approx(1.0));
    CHECK(b.upper == doctest::Approx(1.0));
  }
  const Context Z = Context::free(Basis::parse("x"));
  const auto b = sandwich(parse_element(Z, "1 0\n1 0 x\n"));
  CHECK(b.lower <= 2.0 + 1e-12);
  CHECK(b.upper >= 2.0 - 1e-12);
  CHECK(b.schedule.back().raw_lower > b.schedule.front().raw_lower);
  CHECK(b.schedule.back().raw_lower > 1.9);
}

TEST_CASE("options, truncation and errors") {
  CHECK_THROWS_AS(sandwich(AlgebraElement(F2)), InvalidArgument);
  CHECK_THROWS_AS(sandwich(kesten, {0}), InvalidArgument);
  const Context Y = Context::presented(Basis::parse("x"));
  CHECK_THROWS_AS(sandwich(AlgebraElement::delta(Y, Word{})), ContextMismatch);

  SandwichOptions capped;
  capped.allow_radial = false;
  capped.term_cap = 2000;
  const auto t = sandwich(kesten, capped);
  CHECK(t.truncated);
  CHECK(t.schedule.size() < 8);
  CHECK(t.lower <= 2.0 * std::sqrt(3.0));

  SandwichOptions loose;
  loose.target_ratio = 2.0;
  CHECK(sandwich(kesten, loose).schedule.size() < 8);
}

TEST_CASE("matrix mode is flagged heuristic and uses the column bound") {
  const auto m = AlgebraElement::from_matrix_terms(
      F2, 2, {{parse_word(F2.basis, "a"), {1.0, 0.0, 0.0, 0.0}}, {parse_word(F2.basis, "b"), {0.0, 0.0, 0.0, 1.0}}});
  const auto b = sandwich(m, {4});
  CHECK(b.heuristic);
  // Block diagonal: the norm is max(||delta_a||, ||delta_b||) = 1.
  CHECK(b.lower <= 1.0 + 1e-12);
  CHECK(b.upper >= 1.0 - 1e-12);
}

TEST_CASE("report format") {
  const auto text = bracket_report(sandwich(kesten, {2}));
  CHECK(text.rfind("# residua-csv v1\nj,m,l2,radius,lower,upper\n1,1,", 0) == 0);
}
