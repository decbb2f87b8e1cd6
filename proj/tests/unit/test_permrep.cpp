#include <doctest.h>

#include <Eigen/Dense>
#include <array>
#include <map>
#include <set>

#include "residua/error.hpp"
#include "residua/permrep.hpp"
#include "residua/rng.hpp"

using namespace residua;

namespace {

const Basis ab = Basis::parse("a,b");
const Context F2 = Context::free(ab);
Word w(const char* s) { return parse_word(ab, s); }

// Largest singular value of sum_t a_t P_t on the mean-zero subspace, from a
// dense matrix: the Gram matrix is squared repeatedly and the trace of its
// 2^k-th power gives lambda_max to within a factor dim^(1/2^k).
double dense_norm(const AlgebraElement& z, const PermRep& rep) {
  const std::size_t n = rep.degree;
  const std::size_t r = z.dim();
  const auto dim = static_cast<Eigen::Index>(n * r);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t t = 0; t < z.size(); ++t) {
    // Build the permutation of the word letter by letter.
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (Letter l : z.support()[t].letters()) {
      const auto& img = rep.images[generator_of(l)];
      std::vector<std::size_t> inv(n);
      for (std::size_t i = 0; i < n; ++i) inv[img[i]] = i;
      for (std::size_t i = 0; i < n; ++i) p[i] = l > 0 ? img[p[i]] : inv[p[i]];
    }
    const auto a = z.coefficient(t);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t row = 0; row < r; ++row) {
        for (std::size_t col = 0; col < r; ++col) {
          m(static_cast<Eigen::Index>(i * r + row), static_cast<Eigen::Index>(p[i] * r + col)) += a[row * r + col];
        }
      }
    }
  }
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(dim, dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t c = 0; c < r; ++c) {
        q(static_cast<Eigen::Index>(i * r + c), static_cast<Eigen::Index>(j * r + c)) -= 1.0 / static_cast<double>(n);
      }
    }
  }
  const Eigen::MatrixXcd mq = m * q;
  Eigen::MatrixXcd g = mq.adjoint() * mq;
  double log_scale = 0.0;
  const int squarings = 45;
  for (int k = 0; k < squarings; ++k) {
    g = g * g;
    const double c = g.norm();
    if (c == 0.0) return 0.0;
    g /= c;
    log_scale = 2.0 * log_scale + std::log(c);
  }
  const double lambda = std::exp((std::log(g.trace().real()) + log_scale) / std::ldexp(1.0, squarings));
  return std::sqrt(lambda);
}

AlgebraElement random_element(CounterRng& rng) {
  std::vector<std::pair<Word, Complex>> t;
  const auto words = ball(2, 2);
  const std::size_t terms = 1 + rng.below(6);
  for (std::size_t i = 0; i < terms; ++i) {
    t.emplace_back(words[rng.below(words.size())], Complex(rng.uniform01() - 0.5, rng.uniform01() - 0.5));
  }
  return AlgebraElement::from_terms(F2, std::move(t));
}

}  // namespace

TEST_CASE("permutation conventions") {
  const Permutation x{1, 2, 0};
  const Permutation y{0, 2, 1};
  CHECK(compose(x, y) == Permutation{2, 1, 0});
  CHECK(is_identity(compose(x, invert(x))));
  PermRep rep{ab, 3, {x, y}};
  CHECK(rep.evaluate(w("a b")) == compose(x, y));
  CHECK(rep.evaluate(w("a^-1")) == invert(x));
  CHECK(is_identity(rep.evaluate(Word{})));
}

TEST_CASE("random representations") {
  CHECK_THROWS_AS(random_free_rep(ab, 1, 1), InvalidArgument);
  const Basis a1 = Basis::parse("a");
  std::set<Permutation> seen;
  for (std::uint64_t s = 0; s < 20; ++s) seen.insert(random_free_rep(a1, 2, s).images[0]);
  CHECK(seen == std::set<Permutation>{{0, 1}, {1, 0}});
  CHECK(random_free_rep(ab, 50, 9).images == random_free_rep(ab, 50, 9).images);
  CHECK(random_free_rep(ab, 50, 9).images != random_free_rep(ab, 50, 10).images);
}

TEST_CASE("uniformity over S3") {
  const Basis a1 = Basis::parse("a");
  std::map<Permutation, int> counts;
  const int samples = 10000;
  for (int s = 0; s < samples; ++s) ++counts[random_free_rep(a1, 3, 1000 + s).images[0]];
  REQUIRE(counts.size() == 6);
  double chi2 = 0.0;
  const double expected = samples / 6.0;
  for (const auto& [p, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 5 degrees of freedom, p = 0.001.
  CHECK(chi2 < 20.515);
}

TEST_CASE("induced representations") {
  const auto rep = random_free_rep(ab, 40, 3);
  const auto same = induce_rep(Homomorphism::identity(ab), rep);
  CHECK(same.images == rep.images);
  const Basis g1 = Basis::parse("g");
  const auto prod = induce_rep(Homomorphism(g1, ab, {w("a b")}), rep);
  CHECK(prod.images[0] == compose(rep.images[0], rep.images[1]));

  const Preset p = preset_genus2();
  const auto d = discriminating_hom(p.tower, p.subgroup, 2);
  const Word rel = commutator(parse_word(p.subgroup.names, "a"), parse_word(p.subgroup.names, "b")) *
                   inverse(commutator(parse_word(p.subgroup.names, "c"), parse_word(p.subgroup.names, "d")));
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto y = induce_rep(d.hom, random_free_rep(ab, 12, s));
    CHECK(is_identity(y.evaluate(rel)));
  }
}

TEST_CASE("operator norm basics") {
  const auto rep = random_free_rep(ab, 64, 5);
  for (const char* g : {"", "a", "a b^-1"}) {
    const auto r = op_norm(AlgebraElement::delta(F2, w(g)), rep);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
  }
  const auto z = parse_element(F2, "1 0 a\n2 0 b\n-1 1 a b\n");
  CHECK(op_norm(z, rep).value <= l1(z) + 1e-6);
  CHECK(op_norm(AlgebraElement(F2), rep).value == 0.0);

  const auto m = AlgebraElement::from_matrix_terms(F2, 2, {{Word{}, {1.0, 0.0, 0.0, 1.0}}, {w("a"), {0.0, 1.0, 0.0, 0.0}}});
  const auto mr = op_norm(m, rep);
  CHECK(std::isfinite(mr.value));
  CHECK(mr.value <= l1(m) + 1e-6);

  OpNormOptions tiny;
  tiny.max_iters = 1;
  CHECK_FALSE(op_norm(z, rep, tiny).converged);
}

TEST_CASE("power iteration agrees with the dense oracle") {
  CounterRng rng(51);
  for (int pair = 0; pair < 50; ++pair) {
    const auto z = random_element(rng);
    const std::size_t n = 2 + rng.below(29);
    const auto rep = random_free_rep(ab, n, 500 + pair);
    const double expect = dense_norm(z, rep);
    OpNormOptions o;
    o.tol = 1e-15;
    o.max_iters = 200000;
    const auto got = op_norm(z, rep, o);
    CHECK(got.value == doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("experiment") {
  const Preset p = preset_genus2();
  const Context Y = Context::presented(p.subgroup.names);
  ExperimentConfig c;
  c.sizes = {20, 40};
  c.seeds = {1, 2};
  const auto e = strong_convergence_experiment(p.tower, p.subgroup, AlgebraElement::delta(Y, Word{}), c);
  REQUIRE(e.rows.size() == 4);
  for (const auto& row : e.rows) CHECK(row.op_norm == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e.rows[1].n == 20);
  CHECK(e.rows[1].seed == 2);

  const auto z = parse_element(Y, "1 0 a\n1 0 b\n1 0 c\n1 0 d\n");
  const auto csv = experiment_csv(strong_convergence_experiment(p.tower, p.subgroup, z, c));
  CHECK(csv.rfind("# residua-csv v1\nN,seed,op_norm,converged,reference_upper,l1_cap\n", 0) == 0);
  CHECK(csv == experiment_csv(strong_convergence_experiment(p.tower, p.subgroup, z, c)));

  c.radius = 1;
  CHECK_THROWS_AS(strong_convergence_experiment(p.tower, p.subgroup, z, c), InvalidArgument);
}
