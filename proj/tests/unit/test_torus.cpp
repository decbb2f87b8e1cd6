#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "residua/error.hpp"
#include "residua/normbracket.hpp"
#include "residua/torus.hpp"

using namespace residua;

namespace {

const Basis at = Basis::parse("a,t");
Word w(const char* s) { return parse_word(at, s); }

// Rewrites letter by letter with t a = a^-1 t, t^-1 = t (mod t^2 central) kept
// explicit: track (p, q) with a^p t^q and apply single generators on the right.
KleinKey rewrite(const Word& x) {
  std::int64_t p = 0;
  std::int64_t q = 0;
  for (Letter l : x.letters()) {
    if (generator_of(l) == 0) {
      // a^p t^q a^s = a^(p + (-1)^q s) t^q
      const std::int64_t s = l > 0 ? 1 : -1;
      p += (q % 2 == 0) ? s : -s;
    } else {
      q += l > 0 ? 1 : -1;
    }
  }
  return {p, q};
}

ZrElement random_zr(CounterRng& rng, std::size_t rank) {
  ZrElement z;
  z.rank = rank;
  for (int i = 0; i < 5; ++i) {
    std::vector<std::int64_t> k(rank);
    for (auto& x : k) x = static_cast<std::int64_t>(rng.below(5)) - 2;
    z.coeffs[k] += Complex(rng.uniform01() - 0.5, rng.uniform01() - 0.5);
  }
  return z;
}

KleinElement random_klein(CounterRng& rng) {
  KleinElement z;
  for (int i = 0; i < 5; ++i) {
    const KleinKey k{static_cast<std::int64_t>(rng.below(5)) - 2, static_cast<std::int64_t>(rng.below(5)) - 2};
    z.coeffs[k] += Complex(rng.uniform01() - 0.5, rng.uniform01() - 0.5);
  }
  return z;
}

}  // namespace

TEST_CASE("Klein normal forms") {
  CHECK(klein_normalize(w("t a")) == KleinKey{-1, 1});
  CHECK(klein_normalize(w("t a t^-1")) == KleinKey{-1, 0});
  CounterRng rng(61);
  for (int trial = 0; trial < 500; ++trial) {
    const Word x = Word::reduce(oracle::random_letters(rng, 2, 20));
    const Word y = Word::reduce(oracle::random_letters(rng, 2, 20));
    CHECK(klein_normalize(x) == rewrite(x));
    CHECK(klein_normalize(x * y) == klein_multiply(klein_normalize(x), klein_normalize(y)));
  }
}

TEST_CASE("Z^r grid norms") {
  ZrElement one;
  one.coeffs[{0}] = 1.0;
  ZrElement two;
  two.coeffs[{0}] = 1.0;
  two.coeffs[{1}] = 1.0;
  for (std::uint64_t q : {1, 2, 3, 7, 16, 100, 1024}) {
    CHECK(zr_norm(one, q) == 1.0);
    CHECK(zr_norm(two, q) == 2.0);
  }
  // A full-rank grid cannot exceed the cap.
  ZrElement z3;
  z3.rank = 3;
  z3.coeffs[{0, 0, 0}] = 1.0;
  CHECK_THROWS_AS(zr_norm(z3, 1000, 1'000'000), SizeLimitError);

  // delta_0 - delta_1 peaks at x = 1/2, reached only on even grids.
  ZrElement diff;
  diff.coeffs[{0}] = 1.0;
  diff.coeffs[{1}] = -1.0;
  CHECK(zr_norm(diff, 2) == doctest::Approx(2.0));
  CHECK(zr_norm(diff, 3) == doctest::Approx(std::sqrt(3.0)));

  CounterRng rng(62);
  for (int trial = 0; trial < 10; ++trial) {
    const auto z = random_zr(rng, 2);
    const auto rows = refine_zr(z, 8, 5);
    REQUIRE(rows.size() == 6);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i].q == 2 * rows[i - 1].q);
      // Nested grids: the maximum cannot decrease.
      CHECK(rows[i].norm >= rows[i - 1].norm - 1e-12);
      CHECK(rows[i].change == doctest::Approx(std::abs(rows[i].norm - rows[i - 1].norm)));
    }
    CHECK(rows.back().change < 0.01);
  }
}

TEST_CASE("Klein matrices") {
  CHECK(klein_relation_residual(64) < 1e-12);
  CHECK(op_norm_2x2({Complex(1), Complex(1), Complex(1), Complex(1)}) == doctest::Approx(2.0));
  CHECK(op_norm_2x2({Complex(3), Complex(0), Complex(0), Complex(0, 1)}) == doctest::Approx(3.0));
  // M(t)^2 = e^{i beta} I
  const double beta = 0.7;
  const Mat2 t2 = klein_matrix({0, 2}, 0.3, beta);
  CHECK(std::abs(t2[0] - std::polar(1.0, beta)) < 1e-15);
  CHECK(std::abs(t2[1]) < 1e-15);

  KleinElement da;
  da.coeffs[{1, 0}] = 1.0;
  CHECK(klein_norm(da, 32) == doctest::Approx(1.0));
  KleinElement et;
  et.coeffs[{0, 0}] = 1.0;
  et.coeffs[{0, 1}] = 1.0;
  CHECK(klein_norm(et, 32) == doctest::Approx(2.0));
}

TEST_CASE("Klein elements on <a> push down to Z") {
  CounterRng rng(63);
  for (int trial = 0; trial < 20; ++trial) {
    KleinElement z;
    for (int i = 0; i < 4; ++i) {
      z.coeffs[{static_cast<std::int64_t>(rng.below(7)) - 3, 0}] += Complex(rng.uniform01(), rng.uniform01() - 0.5);
    }
    for (std::uint64_t q : {16, 64}) {
      CHECK(klein_norm(z, q) == doctest::Approx(zr_norm(pushdown(z), q)).epsilon(1e-9));
    }
  }
  KleinElement bad;
  bad.coeffs[{0, 1}] = 1.0;
  CHECK_THROWS_AS(pushdown(bad), InvalidArgument);
}

TEST_CASE("Klein refinement") {
  CounterRng rng(64);
  for (int trial = 0; trial < 5; ++trial) {
    const auto rows = refine_klein(random_klein(rng), 16, 3);
    REQUIRE(rows.size() == 4);
    CHECK(rows.back().change <= 0.05);
  }
}

TEST_CASE("Z is amenable: the free-group bracket of a Z element brackets the grid norm") {
  ZrElement z;
  z.coeffs[{0}] = 1.0;
  z.coeffs[{1}] = Complex(0, 1);
  z.coeffs[{-2}] = 0.5;
  const double grid = refine_zr(z, 64, 4).back().norm;
  const auto b = sandwich(as_free(z, Basis::parse("x")));
  CHECK(b.lower <= grid + 1e-9);
  CHECK(b.upper >= grid - 1e-6);
}

TEST_CASE("text formats") {
  const auto z = parse_zr("# c\n1 0 0 0\n0 1 1 -1\n");
  CHECK(z.rank == 2);
  CHECK(z.coeffs.at({1, -1}) == Complex(0, 1));
  CHECK_THROWS_AS(parse_zr("1 0 0\n1 0 0 0\n"), InvalidArgument);
  const auto k = parse_klein("2 0 1 1\n");
  CHECK(k.coeffs.at({1, 1}) == Complex(2));
  CHECK_THROWS_AS(parse_klein("2 0 1\n"), InvalidArgument);
  CHECK(refine_csv({{8, 1.0, 0.0}}) == "# residua-csv v1\nq,norm,change\n8,1,0\n");
}
