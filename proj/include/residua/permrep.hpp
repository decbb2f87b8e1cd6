#pragma once

// Permutation representations and the operator norm of sum a(g) rho(g) on the
// mean-zero subspace of C^N (tensored with C^r for matrix coefficients).
//
// Convention: permutations act on positions from the right. image(x y)[i] =
// y[x[i]] and (rho(g) f)(i) = f(p_g[i]), which makes rho a homomorphism.
// Example with N = 3, p_x = [1,2,0], p_y = [0,2,1]: p_{xy} = [2,1,0].

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "residua/algebra.hpp"
#include "residua/normbracket.hpp"
#include "residua/tower.hpp"

namespace residua {

using Permutation = std::vector<std::uint32_t>;

Permutation identity_permutation(std::size_t n);
/// The permutation of x followed by y: result[i] = y[x[i]].
Permutation compose(const Permutation& x, const Permutation& y);
Permutation invert(const Permutation& p);
bool is_identity(const Permutation& p);

struct PermRep {
  Basis basis;
  std::size_t degree = 0;
  std::vector<Permutation> images;

  Permutation evaluate(const Word& w) const;
};

/// Independent uniform permutations (Fisher-Yates), one stream per generator.
PermRep random_free_rep(const Basis& basis, std::size_t n, std::uint64_t seed);
/// Generator g of the domain goes to the permutation of phi(g).
PermRep induce_rep(const Homomorphism& phi, const PermRep& free_rep);

struct OpNormOptions {
  double tol = 1e-12;
  std::size_t max_iters = 20000;
  std::uint64_t seed = 0;
};

struct OpNormResult {
  double value = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Largest singular value of B = sum a(g) rho(g) restricted to the mean-zero
/// subspace, by power iteration on B*B with the constants projected out each step.
OpNormResult op_norm(const AlgebraElement& z, const PermRep& rep, const OpNormOptions& options = {});

struct ExperimentConfig {
  std::vector<std::size_t> sizes;
  std::vector<std::uint64_t> seeds;
  /// Radius for the discriminating homomorphism; z must lie in B_Y(radius / 2).
  std::size_t radius = 2;
  OpNormOptions op;
  std::size_t ref_doublings = 2;
  DiscriminateOptions discriminate;
};

struct ExperimentRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double op_norm = 0.0;
  bool converged = false;
  double reference_upper = 0.0;
  double l1_cap = 0.0;
};

struct ExperimentResult {
  NormBracket reference;
  std::vector<std::int64_t> m;
  std::vector<ExperimentRow> rows;  // sizes outer, seeds inner
};

ExperimentResult strong_convergence_experiment(const Tower& tower, const Subgroup& y, const AlgebraElement& z,
                                               const ExperimentConfig& config);

std::string experiment_csv(const ExperimentResult& result);

}  // namespace residua
