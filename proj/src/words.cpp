#include "residua/words.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <charconv>
#include <limits>
#include <unordered_set>

#include <fmt/format.h>

#include "residua/error.hpp"

namespace residua {

bool is_identifier(std::string_view s) noexcept {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return u < 128 && (std::isalnum(u) || u == '_');
  });
}

Basis::Basis(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw InvalidArgument("basis must contain at least one generator");
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (!is_identifier(n)) throw InvalidArgument(fmt::format("invalid generator name '{}'", n));
    if (!seen.insert(n).second) throw InvalidArgument(fmt::format("duplicate generator name '{}'", n));
  }
}

Basis Basis::parse(std::string_view list) {
  std::vector<std::string> names;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto comma = list.find(',', start);
    if (comma == std::string_view::npos) comma = list.size();
    auto item = list.substr(start, comma - start);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
    names.emplace_back(item);
    start = comma + 1;
  }
  return Basis(std::move(names));
}

std::optional<std::size_t> Basis::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

namespace {

constexpr std::uint32_t order_key(Letter l) noexcept {
  return static_cast<std::uint32_t>(generator_of(l)) * 2 + (l < 0 ? 1 : 0);
}

}  // namespace

std::strong_ordering operator<=>(const Word& a, const Word& b) noexcept {
  if (auto c = a.length() <=> b.length(); c != 0) return c;
  for (std::size_t i = 0; i < a.length(); ++i) {
    if (a[i] != b[i]) return order_key(a[i]) <=> order_key(b[i]);
  }
  return std::strong_ordering::equal;
}

Word Word::reduce(std::span<const Letter> raw, std::size_t rank) {
  Word out;
  out.letters_.reserve(raw.size());
  for (Letter l : raw) {
    if (l == 0) throw InvalidArgument("letter 0 is not a signed generator");
    if (rank != 0 && generator_of(l) >= rank) {
      throw InvalidArgument(fmt::format("generator index {} out of range for rank {}", generator_of(l), rank));
    }
    if (!out.letters_.empty() && out.letters_.back() == -l) {
      out.letters_.pop_back();
    } else {
      out.letters_.push_back(l);
    }
  }
  return out;
}

Word Word::generator(std::size_t index, int sign) {
  Word out;
  out.letters_.push_back(letter_for(index, sign));
  return out;
}

Word Word::from_reduced(std::vector<Letter> letters) {
#ifndef NDEBUG
  for (std::size_t i = 0; i + 1 < letters.size(); ++i) assert(letters[i] != -letters[i + 1]);
#endif
  Word out;
  out.letters_ = std::move(letters);
  return out;
}

std::size_t Word::min_rank() const noexcept {
  std::size_t r = 0;
  for (Letter l : letters_) r = std::max(r, generator_of(l) + 1);
  return r;
}

std::size_t cancellation(std::span<const Letter> u, std::span<const Letter> v) noexcept {
  std::size_t k = 0;
  const std::size_t limit = std::min(u.size(), v.size());
  while (k < limit && u[u.size() - 1 - k] == -v[k]) ++k;
  return k;
}

void append_reduced(std::vector<Letter>& buffer, std::span<const Letter> rhs) {
  const std::size_t k = cancellation(buffer, rhs);
  buffer.resize(buffer.size() - k);
  buffer.insert(buffer.end(), rhs.begin() + static_cast<std::ptrdiff_t>(k), rhs.end());
}

Word operator*(const Word& u, const Word& v) {
  const auto a = u.letters();
  const auto b = v.letters();
  const std::size_t k = cancellation(a, b);
  std::vector<Letter> out;
  out.reserve(a.size() + b.size() - 2 * k);
  out.insert(out.end(), a.begin(), a.end() - static_cast<std::ptrdiff_t>(k));
  out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(k), b.end());
  return Word::from_reduced(std::move(out));
}

Word inverse(const Word& w) {
  std::vector<Letter> out(w.length());
  const auto src = w.letters();
  for (std::size_t i = 0; i < src.size(); ++i) out[i] = -src[src.size() - 1 - i];
  return Word::from_reduced(std::move(out));
}

namespace {

// Length of the maximal prefix p with w = p c p^-1 reduced.
std::size_t conjugator_length(std::span<const Letter> w) noexcept {
  std::size_t i = 0;
  while (2 * i + 1 < w.size() && w[i] == -w[w.size() - 1 - i]) ++i;
  return i;
}

}  // namespace

Word power(const Word& w, std::int64_t k) {
  if (k == 0 || w.empty()) return {};
  const auto letters = w.letters();
  const std::size_t p = conjugator_length(letters);
  const auto core = letters.subspan(p, letters.size() - 2 * p);
  const std::uint64_t reps = k < 0 ? 0 - static_cast<std::uint64_t>(k) : static_cast<std::uint64_t>(k);
  std::vector<Letter> out;
  out.reserve(2 * p + core.size() * reps);
  out.insert(out.end(), letters.begin(), letters.begin() + static_cast<std::ptrdiff_t>(p));
  if (k > 0) {
    for (std::uint64_t r = 0; r < reps; ++r) out.insert(out.end(), core.begin(), core.end());
  } else {
    std::vector<Letter> inv(core.rbegin(), core.rend());
    for (auto& l : inv) l = -l;
    for (std::uint64_t r = 0; r < reps; ++r) out.insert(out.end(), inv.begin(), inv.end());
  }
  out.insert(out.end(), letters.end() - static_cast<std::ptrdiff_t>(p), letters.end());
  return Word::from_reduced(std::move(out));
}

Word commutator(const Word& u, const Word& v) { return u * v * inverse(u) * inverse(v); }

bool is_cyclically_reduced(const Word& w) noexcept {
  return w.length() <= 1 || w.front() != -w.back();
}

Word CyclicDecomposition::recompose() const {
  return conjugator * power(core, exponent) * inverse(conjugator);
}

Word CyclicDecomposition::root() const { return conjugator * core * inverse(conjugator); }

CyclicDecomposition cyclic_decompose(const Word& w) {
  if (w.empty()) throw InvalidArgument("the identity has no cyclic decomposition");
  const auto letters = w.letters();
  const std::size_t p = conjugator_length(letters);
  const auto core = letters.subspan(p, letters.size() - 2 * p);
  // Smallest period of the core from the failure function.
  const std::size_t n = core.size();
  std::vector<std::size_t> fail(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t k = fail[i - 1];
    while (k > 0 && core[i] != core[k]) k = fail[k - 1];
    if (core[i] == core[k]) ++k;
    fail[i] = k;
  }
  std::size_t period = n - fail[n - 1];
  if (n % period != 0) period = n;
  CyclicDecomposition out;
  out.conjugator = Word::from_reduced({letters.begin(), letters.begin() + static_cast<std::ptrdiff_t>(p)});
  out.core = Word::from_reduced({core.begin(), core.begin() + static_cast<std::ptrdiff_t>(period)});
  out.exponent = static_cast<std::int64_t>(n / period);
  return out;
}

bool commute(const Word& u, const Word& v) { return commutator(u, v).empty(); }

std::optional<std::int64_t> power_exponent(const Word& g, const Word& u) {
  if (u.empty()) throw InvalidArgument("power_exponent needs a nontrivial base");
  if (g.empty()) return 0;
  const auto d = cyclic_decompose(u);
  const Word w = inverse(d.conjugator) * g * d.conjugator;
  const std::size_t s = d.core.length();
  if (w.length() % s != 0) return std::nullopt;
  const auto j = static_cast<std::int64_t>(w.length() / s);
  std::int64_t signed_j = 0;
  if (w == power(d.core, j)) {
    signed_j = j;
  } else if (w == power(d.core, -j)) {
    signed_j = -j;
  } else {
    return std::nullopt;
  }
  if (signed_j % d.exponent != 0) return std::nullopt;
  return signed_j / d.exponent;
}

void validate(const Word& w, std::size_t rank) {
  for (Letter l : w.letters()) {
    if (generator_of(l) >= rank) {
      throw InvalidArgument(fmt::format("generator index {} out of range for rank {}", generator_of(l), rank));
    }
  }
}

Word parse_word(const Basis& basis, std::string_view text) {
  std::vector<Letter> raw;
  std::size_t i = 0;
  auto space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (i < text.size()) {
    while (i < text.size() && space(text[i])) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !space(text[j])) ++j;
    const auto token = text.substr(i, j - i);
    i = j;
    const auto caret = token.find('^');
    const auto name = token.substr(0, caret);
    const auto index = basis.index_of(name);
    if (!index) throw InvalidArgument(fmt::format("unknown generator '{}' in word '{}'", name, text));
    std::int64_t exponent = 1;
    if (caret != std::string_view::npos) {
      auto digits = token.substr(caret + 1);
      if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
      const auto* first = digits.data();
      const auto* last = digits.data() + digits.size();
      auto [ptr, ec] = std::from_chars(first, last, exponent);
      if (digits.empty() || ec != std::errc() || ptr != last || exponent == 0) {
        throw InvalidArgument(fmt::format("bad exponent in token '{}'", token));
      }
    }
    const Letter l = letter_for(*index, exponent < 0 ? -1 : +1);
    const std::uint64_t reps = exponent < 0 ? 0 - static_cast<std::uint64_t>(exponent) : static_cast<std::uint64_t>(exponent);
    for (std::uint64_t r = 0; r < reps; ++r) raw.push_back(l);
  }
  return Word::reduce(raw, basis.rank());
}

std::string format_word(const Basis& basis, const Word& w) {
  std::string out;
  const auto letters = w.letters();
  std::size_t i = 0;
  while (i < letters.size()) {
    std::size_t j = i;
    while (j < letters.size() && letters[j] == letters[i]) ++j;
    const auto run = static_cast<std::int64_t>(j - i);
    const std::size_t g = generator_of(letters[i]);
    if (g >= basis.rank()) throw InvalidArgument("word does not fit the basis");
    if (!out.empty()) out += ' ';
    out += basis.name(g);
    const std::int64_t exponent = letters[i] < 0 ? -run : run;
    if (exponent != 1) out += fmt::format("^{}", exponent);
    i = j;
  }
  return out;
}

std::uint64_t sphere_size(std::size_t rank, std::size_t radius) noexcept {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (radius == 0) return 1;
  if (rank == 0) return 0;
  std::uint64_t size = 2 * rank;
  const std::uint64_t branch = 2 * rank - 1;
  for (std::size_t i = 1; i < radius; ++i) {
    if (branch != 0 && size > kMax / branch) return kMax;
    size *= branch;
  }
  return size;
}

std::uint64_t ball_size(std::size_t rank, std::size_t radius) noexcept {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (rank == 1) return radius >= kMax / 2 ? kMax : 1 + 2 * static_cast<std::uint64_t>(radius);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i <= radius; ++i) {
    const std::uint64_t s = sphere_size(rank, i);
    if (s == kMax || total > kMax - s) return kMax;
    total += s;
  }
  return total;
}

std::vector<Word> ball(std::size_t rank, std::size_t radius, std::uint64_t cap) {
  if (rank == 0) throw InvalidArgument("ball needs a basis of rank >= 1");
  const std::uint64_t predicted = ball_size(rank, radius);
  if (predicted > cap) {
    throw SizeLimitError(fmt::format("ball of radius {} in rank {} has {} words, cap is {}", radius, rank,
                                     predicted, cap),
                         predicted, cap);
  }
  std::vector<Word> out;
  out.reserve(predicted);
  out.emplace_back();
  std::size_t sphere_begin = 0;
  for (std::size_t r = 1; r <= radius; ++r) {
    const std::size_t sphere_end = out.size();
    for (std::size_t i = sphere_begin; i < sphere_end; ++i) {
      for (std::size_t g = 0; g < rank; ++g) {
        for (int sign : {+1, -1}) {
          const Letter l = letter_for(g, sign);
          const auto base = out[i].letters();
          if (!base.empty() && base.back() == -l) continue;
          std::vector<Letter> next(base.begin(), base.end());
          next.push_back(l);
          out.push_back(Word::from_reduced(std::move(next)));
        }
      }
    }
    sphere_begin = sphere_end;
  }
  return out;
}

std::size_t WordHash::operator()(std::span<const Letter> letters) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ letters.size();
  for (Letter l : letters) {
    h ^= static_cast<std::uint32_t>(l);
    h *= 0x100000001b3ULL;
  }
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return static_cast<std::size_t>(h);
}

}  // namespace residua
