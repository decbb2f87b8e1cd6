#pragma once

// Radial elements of C[F_k]: functions constant on each sphere S(n). They form
// a commutative subalgebra, so convolution powers of symmetric generator sums
// can be taken sphere by sphere instead of word by word.

#include <cstddef>
#include <optional>
#include <vector>

#include "residua/algebra.hpp"

namespace residua {

/// mass[n] = w_n * sqrt|S(n)| where w_n is the coefficient shared by every word
/// of length n. With this scaling the l2 norm is the Euclidean norm of `mass`.
struct RadialElement {
  std::size_t rank = 0;
  std::vector<Complex> mass;
};

/// log |S(n)| in a free group of the given rank.
double log_sphere_size(std::size_t rank, std::size_t n);

/// Detects a radial scalar element of a free context: every occupied length n
/// carries all |S(n)| words with bitwise equal coefficients.
std::optional<RadialElement> as_radial(const AlgebraElement& a);

RadialElement radial_convolve(const RadialElement& a, const RadialElement& b);
RadialElement radial_star(const RadialElement& a);
RadialElement radial_scaled(const RadialElement& a, double factor);
double radial_l2(const RadialElement& a);
/// Largest n with nonzero mass; 0 for the zero element.
std::size_t radial_radius(const RadialElement& a);

/// Word-level expansion. Enumerates the support ball, so only for small radii.
AlgebraElement expand(const RadialElement& a, const Context& context,
                      std::uint64_t cap = kDefaultBallCap);

}  // namespace residua
