#include "residua/permrep.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "residua/csv.hpp"
#include "residua/error.hpp"
#include "residua/parallel.hpp"
#include "residua/rng.hpp"

namespace residua {

Permutation identity_permutation(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0U);
  return p;
}

Permutation compose(const Permutation& x, const Permutation& y) {
  if (x.size() != y.size()) throw ContextMismatch("permutations of different degree");
  Permutation out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = y[x[i]];
  return out;
}

Permutation invert(const Permutation& p) {
  Permutation out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[p[i]] = static_cast<std::uint32_t>(i);
  return out;
}

bool is_identity(const Permutation& p) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] != i) return false;
  }
  return true;
}

Permutation PermRep::evaluate(const Word& w) const {
  std::vector<Permutation> inverses(images.size());
  Permutation out = identity_permutation(degree);
  Permutation next(degree);
  for (Letter l : w.letters()) {
    const std::size_t g = generator_of(l);
    if (g >= images.size()) throw InvalidArgument("word does not belong to the representation's group");
    if (l < 0 && inverses[g].empty()) inverses[g] = invert(images[g]);
    const Permutation& p = l > 0 ? images[g] : inverses[g];
    for (std::size_t i = 0; i < degree; ++i) next[i] = p[out[i]];
    out.swap(next);
  }
  return out;
}

PermRep random_free_rep(const Basis& basis, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("representation degree must be at least 2");
  if (n > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("representation degree too large");
  PermRep rep{basis, n, {}};
  const CounterRng root(seed);
  for (std::size_t g = 0; g < basis.rank(); ++g) {
    CounterRng rng = root.split(g);
    Permutation p = identity_permutation(n);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(p[i], p[rng.below(i + 1)]);
    rep.images.push_back(std::move(p));
  }
  return rep;
}

PermRep induce_rep(const Homomorphism& phi, const PermRep& free_rep) {
  if (!(phi.codomain() == free_rep.basis)) throw ContextMismatch("representation is not over the codomain of phi");
  PermRep out{phi.domain(), free_rep.degree, {}};
  for (const Word& w : phi.images()) out.images.push_back(free_rep.evaluate(w));
  return out;
}

namespace {

class StdOperator {
 public:
  StdOperator(const AlgebraElement& z, const PermRep& rep) : z_(z), n_(rep.degree), r_(z.dim()) {
    if (!(z.context().basis == rep.basis)) throw ContextMismatch("element and representation use different bases");
    for (const Word& w : z.support()) perms_.push_back(rep.evaluate(w));
  }

  std::size_t size() const { return n_ * r_; }

  // out = B f, vectors laid out as f[i * r + c].
  void apply(const std::vector<Complex>& f, std::vector<Complex>& out) const {
    std::fill(out.begin(), out.end(), Complex{});
    for (std::size_t t = 0; t < perms_.size(); ++t) {
      const auto a = z_.coefficient(t);
      const Permutation& p = perms_[t];
      for (std::size_t i = 0; i < n_; ++i) {
        const Complex* src = &f[p[i] * r_];
        Complex* dst = &out[i * r_];
        for (std::size_t row = 0; row < r_; ++row) {
          Complex acc{};
          for (std::size_t col = 0; col < r_; ++col) acc += a[row * r_ + col] * src[col];
          dst[row] += acc;
        }
      }
    }
  }

  // out = B* f.
  void apply_adjoint(const std::vector<Complex>& f, std::vector<Complex>& out) const {
    std::fill(out.begin(), out.end(), Complex{});
    for (std::size_t t = 0; t < perms_.size(); ++t) {
      const auto a = z_.coefficient(t);
      const Permutation& p = perms_[t];
      for (std::size_t i = 0; i < n_; ++i) {
        const Complex* src = &f[i * r_];
        Complex* dst = &out[p[i] * r_];
        for (std::size_t col = 0; col < r_; ++col) {
          Complex acc{};
          for (std::size_t row = 0; row < r_; ++row) acc += std::conj(a[row * r_ + col]) * src[row];
          dst[col] += acc;
        }
      }
    }
  }

  // Removes the constant component of every coordinate of C^r.
  void project(std::vector<Complex>& f) const {
    for (std::size_t c = 0; c < r_; ++c) {
      Complex mean{};
      for (std::size_t i = 0; i < n_; ++i) mean += f[i * r_ + c];
      mean /= static_cast<double>(n_);
      for (std::size_t i = 0; i < n_; ++i) f[i * r_ + c] -= mean;
    }
  }

 private:
  const AlgebraElement& z_;
  std::size_t n_;
  std::size_t r_;
  std::vector<Permutation> perms_;
};

double norm2(const std::vector<Complex>& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

}  // namespace

OpNormResult op_norm(const AlgebraElement& z, const PermRep& rep, const OpNormOptions& options) {
  if (rep.degree < 2) throw InvalidArgument("representation degree must be at least 2");
  OpNormResult result;
  if (z.is_zero()) {
    result.converged = true;
    return result;
  }
  const StdOperator op(z, rep);
  std::vector<Complex> v(op.size());
  std::vector<Complex> bv(op.size());
  std::vector<Complex> w(op.size());
  CounterRng rng(options.seed, 0x5eed);
  for (auto& x : v) x = Complex(rng.uniform01() - 0.5, rng.uniform01() - 0.5);
  op.project(v);
  double nv = norm2(v);
  if (nv == 0.0) throw InvariantViolation("power iteration start vector vanished");
  for (auto& x : v) x /= nv;

  double previous = -1.0;
  for (std::size_t it = 1; it <= options.max_iters; ++it) {
    op.apply(v, bv);
    op.apply_adjoint(bv, w);
    op.project(w);
    // Rayleigh quotient <v, B*B v> = |B v|^2 for unit v.
    const double nb = norm2(bv);
    const double rayleigh = nb * nb;
    result.value = std::max(result.value, std::sqrt(rayleigh));
    result.iterations = it;
    const double nw = norm2(w);
    if (nw == 0.0) {
      result.converged = true;
      break;
    }
    if (previous >= 0.0 && std::abs(rayleigh - previous) <= options.tol * rayleigh) {
      result.converged = true;
      break;
    }
    previous = rayleigh;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / nw;
  }
  return result;
}

ExperimentResult strong_convergence_experiment(const Tower& tower, const Subgroup& y, const AlgebraElement& z,
                                               const ExperimentConfig& config) {
  if (!(z.context().basis == y.names)) throw ContextMismatch("element must be written over the subgroup generators");
  if (z.is_zero()) throw InvalidArgument("experiment element is zero");
  if (2 * max_word_length(z) > config.radius) {
    throw InvalidArgument(fmt::format("element support radius {} exceeds half the certified radius {}",
                                      max_word_length(z), config.radius));
  }
  const Discrimination disc = discriminating_hom(tower, y, config.radius, config.discriminate);
  ExperimentResult result;
  result.m = disc.m;
  SandwichOptions so;
  so.max_doublings = config.ref_doublings;
  result.reference = sandwich(pushforward(disc.hom, z), so);

  const double cap = l1(z);
  const std::size_t cells = config.sizes.size() * config.seeds.size();
  result.rows.resize(cells);
  parallel_for(cells, [&](std::size_t c) {
    const std::size_t n = config.sizes[c / config.seeds.size()];
    const std::uint64_t seed = config.seeds[c % config.seeds.size()];
    const PermRep rep = induce_rep(disc.hom, random_free_rep(tower.base(), n, seed));
    OpNormOptions op = config.op;
    op.seed = CounterRng::mix(seed ^ (0x9e3779b97f4a7c15ULL * (n + 1)));
    const OpNormResult r = op_norm(z, rep, op);
    result.rows[c] = {n, seed, r.value, r.converged, result.reference.upper, cap};
  });
  return result;
}

std::string experiment_csv(const ExperimentResult& result) {
  std::string out = csv_preamble("N,seed,op_norm,converged,reference_upper,l1_cap");
  for (const auto& r : result.rows) {
    out += fmt::format("{},{},{},{},{},{}\n", r.n, r.seed, format_real(r.op_norm), r.converged ? 1 : 0,
                       format_real(r.reference_upper), format_real(r.l1_cap));
  }
  return out;
}

}  // namespace residua
