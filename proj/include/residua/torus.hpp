#pragma once

// Exact Fourier models. For z in C[Z^r], ||lambda(z)|| is the sup over the
// torus of |sum_v z(v) e^{2 pi i <v, x>}|, approximated from below on the grid
// T_q^r = (Z/q)^r / q. The Klein bottle group K = <a, t | t a t^-1 = a^-1> uses
// the representations induced from characters of <a, t^2>:
//   a -> diag(e^{i alpha}, e^{-i alpha}),  t -> [[0, e^{i beta}], [1, 0]].

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "residua/algebra.hpp"

namespace residua {

inline constexpr std::uint64_t kDefaultGridCap = 100'000'000;

struct ZrElement {
  std::size_t rank = 1;
  std::map<std::vector<std::int64_t>, Complex> coeffs;
};

/// Normal form a^p t^q.
using KleinKey = std::pair<std::int64_t, std::int64_t>;

struct KleinElement {
  std::map<KleinKey, Complex> coeffs;
};

/// Word over generators a (index 0) and t (index 1) to its normal form.
KleinKey klein_normalize(const Word& w);
/// (p, q)(p', q') = (p + (-1)^q p', q + q').
KleinKey klein_multiply(const KleinKey& x, const KleinKey& y);

double zr_norm(const ZrElement& z, std::uint64_t q, std::uint64_t cap = kDefaultGridCap);
double klein_norm(const KleinElement& z, std::uint64_t q, std::uint64_t cap = kDefaultGridCap);

/// Row-major 2x2 complex matrix.
using Mat2 = std::array<Complex, 4>;
Mat2 klein_matrix(const KleinKey& key, double alpha, double beta);
/// Largest singular value from the eigenvalues of the Gram matrix.
double op_norm_2x2(const Mat2& m);
/// Largest entrywise deviation in t a t^-1 = a^-1 and t^2 = e^{i beta} I over the q x q grid.
double klein_relation_residual(std::uint64_t q);

/// Restriction of an element supported on <a> to C[Z]; throws otherwise.
ZrElement pushdown(const KleinElement& z);
/// An element of C[Z] viewed in the free group on one generator.
AlgebraElement as_free(const ZrElement& z, const Basis& basis);

struct RefineRow {
  std::uint64_t q = 0;
  double norm = 0.0;
  /// |N_q - N_{q/2}|; 0 for the first row.
  double change = 0.0;
};

/// Grid maxima for q0, 2 q0, ..., 2^levels q0.
std::vector<RefineRow> refine_zr(const ZrElement& z, std::uint64_t q0, std::size_t levels,
                                 std::uint64_t cap = kDefaultGridCap);
std::vector<RefineRow> refine_klein(const KleinElement& z, std::uint64_t q0, std::size_t levels,
                                    std::uint64_t cap = kDefaultGridCap);

/// `RE IM k_1 ... k_r` per line; r is fixed by the first term.
ZrElement parse_zr(std::string_view text);
/// `RE IM p q` per line for the element a^p t^q.
KleinElement parse_klein(std::string_view text);

std::string refine_csv(const std::vector<RefineRow>& rows);

}  // namespace residua
