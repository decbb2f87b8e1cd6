#pragma once

// Free group arithmetic: reduced words, products, powers, cyclic structure,
// balls, and the text syntax used by every file format in the project.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace residua {

/// A signed generator: +(i+1) for x_i, -(i+1) for x_i^-1. Zero is never valid.
using Letter = std::int32_t;

constexpr std::size_t generator_of(Letter l) noexcept {
  return static_cast<std::size_t>(l < 0 ? -l : l) - 1;
}
constexpr Letter letter_for(std::size_t generator, int sign = +1) noexcept {
  const auto l = static_cast<Letter>(generator + 1);
  return sign < 0 ? -l : l;
}

/// Ordered list of distinct generator names.
class Basis {
 public:
  Basis() = default;
  explicit Basis(std::vector<std::string> names);

  /// Parses a comma separated list such as "a,b,c".
  static Basis parse(std::string_view list);

  std::size_t rank() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const Basis&, const Basis&) = default;

 private:
  std::vector<std::string> names_;
};

bool is_identifier(std::string_view s) noexcept;

/// A freely reduced word. Ordering is shortlex, which every container in the
/// library uses for deterministic iteration.
class Word {
 public:
  Word() = default;

  /// Free reduction by stack scan. Throws InvalidArgument on a zero letter or
  /// on a generator index >= rank (rank 0 skips the range check).
  static Word reduce(std::span<const Letter> raw, std::size_t rank = 0);
  static Word generator(std::size_t index, int sign = +1);
  /// Adopts letters that are already reduced. Checked in debug builds only.
  static Word from_reduced(std::vector<Letter> letters);

  std::span<const Letter> letters() const noexcept { return letters_; }
  std::size_t length() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Letter front() const { return letters_.front(); }
  Letter back() const { return letters_.back(); }
  /// Largest generator index + 1 appearing in the word.
  std::size_t min_rank() const noexcept;

  friend bool operator==(const Word&, const Word&) = default;
  friend std::strong_ordering operator<=>(const Word& a, const Word& b) noexcept;

 private:
  std::vector<Letter> letters_;
};

Word operator*(const Word& u, const Word& v);
Word inverse(const Word& w);
/// w^k for any integer k, in time linear in the output length.
Word power(const Word& w, std::int64_t k);
Word commutator(const Word& u, const Word& v);

/// Appends `rhs` to a reduced letter buffer, cancelling at the seam.
void append_reduced(std::vector<Letter>& buffer, std::span<const Letter> rhs);
/// Length of the cancellation between the tail of u and the head of v.
std::size_t cancellation(std::span<const Letter> u, std::span<const Letter> v) noexcept;

bool is_cyclically_reduced(const Word& w) noexcept;

/// w = conjugator * core^exponent * conjugator^-1 with core cyclically reduced
/// and not a proper power.
struct CyclicDecomposition {
  Word conjugator;
  Word core;
  std::int64_t exponent = 1;

  Word recompose() const;
  /// The primitive root conjugator * core * conjugator^-1.
  Word root() const;
};

/// Throws InvalidArgument on the empty word.
CyclicDecomposition cyclic_decompose(const Word& w);

/// True iff uvu^-1v^-1 reduces to the empty word.
bool commute(const Word& u, const Word& v);

/// Returns k with g = u^k, if one exists. u must be nonempty.
std::optional<std::int64_t> power_exponent(const Word& g, const Word& u);

/// Throws InvalidArgument if a letter of w is outside a basis of the given rank.
void validate(const Word& w, std::size_t rank);

/// Parses whitespace separated tokens `name` or `name^k` (k a nonzero integer).
/// The empty string is the identity.
Word parse_word(const Basis& basis, std::string_view text);
/// Inverse of parse_word; runs of a letter are written with an exponent.
std::string format_word(const Basis& basis, const Word& w);

/// |B(r)| for a free group of the given rank, saturating at UINT64_MAX.
std::uint64_t ball_size(std::size_t rank, std::size_t radius) noexcept;
/// |S(r)|, the number of reduced words of length exactly r.
std::uint64_t sphere_size(std::size_t rank, std::size_t radius) noexcept;

inline constexpr std::uint64_t kDefaultBallCap = 10'000'000;

/// All reduced words of length <= radius, in shortlex order, each exactly once.
/// Throws SizeLimitError when the predicted count exceeds `cap`.
std::vector<Word> ball(std::size_t rank, std::size_t radius,
                       std::uint64_t cap = kDefaultBallCap);

struct WordHash {
  using is_transparent = void;
  std::size_t operator()(std::span<const Letter> letters) const noexcept;
  std::size_t operator()(const Word& w) const noexcept { return (*this)(w.letters()); }
};

struct WordEqual {
  using is_transparent = void;
  static std::span<const Letter> view(const Word& w) noexcept { return w.letters(); }
  static std::span<const Letter> view(std::span<const Letter> s) noexcept { return s; }
  template <typename A, typename B>
  bool operator()(const A& a, const B& b) const noexcept {
    const auto x = view(a);
    const auto y = view(b);
    return x.size() == y.size() && std::equal(x.begin(), x.end(), y.begin());
  }
};

}  // namespace residua
