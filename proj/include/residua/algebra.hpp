#pragma once

// Finitely supported elements of a group algebra over a word-presented group,
// with scalar or r x r matrix coefficients.

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "residua/homomorphism.hpp"
#include "residua/words.hpp"

namespace residua {

using Complex = std::complex<double>;

/// How keys of an element are interpreted.
///   Free:      reduced words are exactly the group elements (convolution allowed).
///   Presented: words over a generating set of a group with relations (a tower
///              subgroup); only pushforward, norms of coefficients and star apply.
enum class GroupKind { Free, Presented };

struct Context {
  Basis basis;
  GroupKind kind = GroupKind::Free;

  static Context free(Basis b) { return {std::move(b), GroupKind::Free}; }
  static Context presented(Basis b) { return {std::move(b), GroupKind::Presented}; }
  friend bool operator==(const Context&, const Context&) = default;
};

inline constexpr std::size_t kDefaultTermCap = 50'000'000;

class AlgebraElement {
 public:
  explicit AlgebraElement(Context context);
  /// The zero element with dim x dim matrix coefficients.
  static AlgebraElement zero_matrix(Context context, std::size_t dim);
  static AlgebraElement delta(Context context, const Word& w, Complex c = 1.0);
  /// Sums duplicate words; drops coefficients that are exactly zero.
  static AlgebraElement from_terms(Context context, std::vector<std::pair<Word, Complex>> terms);
  /// Matrix coefficients in row-major order, each of size dim * dim.
  static AlgebraElement from_matrix_terms(Context context, std::size_t dim,
                                          std::vector<std::pair<Word, std::vector<Complex>>> terms);

  const Context& context() const noexcept { return context_; }
  bool is_matrix() const noexcept { return matrix_; }
  /// Matrix dimension; 1 for scalar elements.
  std::size_t dim() const noexcept { return dim_; }
  std::size_t block() const noexcept { return dim_ * dim_; }
  std::size_t size() const noexcept { return words_.size(); }
  bool is_zero() const noexcept { return words_.empty(); }

  /// Support in shortlex order.
  const std::vector<Word>& support() const noexcept { return words_; }
  std::span<const Complex> coefficient(std::size_t term) const {
    return std::span<const Complex>(coeffs_).subspan(term * block(), block());
  }
  const std::vector<Complex>& raw_coefficients() const noexcept { return coeffs_; }
  /// Coefficient block at w, if w is in the support.
  std::optional<std::span<const Complex>> find(const Word& w) const;
  /// Scalar coefficient at w (0 when absent). Matrix elements return entry (0,0).
  Complex at(const Word& w) const;

  AlgebraElement scaled(Complex factor) const;
  /// Same terms interpreted in another context with an equal basis rank.
  AlgebraElement with_context(Context context) const;

  friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b);
  friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b);

 private:
  friend class TermAccumulator;
  Context context_;
  std::size_t dim_ = 1;
  bool matrix_ = false;
  std::vector<Word> words_;
  std::vector<Complex> coeffs_;
};

/// Hash-map accumulator used to build elements term by term. Lookups take a
/// letter span so that no Word is allocated for keys already present.
class TermAccumulator {
 public:
  TermAccumulator(Context context, std::size_t dim, bool matrix, std::uint64_t term_cap = kDefaultTermCap);
  /// Returns the coefficient block for the word (zero-initialised if new).
  Complex* slot(std::span<const Letter> word);
  std::size_t size() const noexcept;
  AlgebraElement finish() &&;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

/// (a * b)(g) = sum_h a(h) b(h^-1 g). Free contexts only.
AlgebraElement convolve(const AlgebraElement& a, const AlgebraElement& b,
                        std::uint64_t term_cap = kDefaultTermCap);
/// a*(g) = a(g^-1)^H.
AlgebraElement star(const AlgebraElement& a);

/// Sum of coefficient norms (operator norm for matrices).
double l1(const AlgebraElement& a);
/// sqrt of the sum of |c|^2 (squared Frobenius norms for matrices).
double l2(const AlgebraElement& a);
/// sqrt(|| sum_g a(g)^H a(g) ||_op): the best lower bound || lambda(a)(delta_e (x) v) ||.
/// Equals l2 for scalar elements.
double column_l2(const AlgebraElement& a);
/// Largest word length in the support. Throws on the zero element and on
/// presented contexts.
std::size_t support_radius(const AlgebraElement& a);
/// Largest key length regardless of context kind (0 for the zero element).
std::size_t max_word_length(const AlgebraElement& a);

/// Image under a homomorphism; colliding images have their coefficients summed.
/// The result lives in the free context of the codomain.
AlgebraElement pushforward(const Homomorphism& phi, const AlgebraElement& a);

/// Operator norm of a dim x dim row-major complex matrix.
double matrix_op_norm(std::span<const Complex> m, std::size_t dim);

/// Text format: one term per line `RE IM <word>`; matrix mode starts with
/// `matdim r` and uses `RE IM ROW COL <word>`. Blank lines and `#` comments
/// are ignored.
AlgebraElement parse_element(const Context& context, std::string_view text);
std::string format_element(const AlgebraElement& a);

}  // namespace residua
