#include "residua/torus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "residua/csv.hpp"
#include "residua/error.hpp"
#include "residua/parallel.hpp"

namespace residua {

KleinKey klein_normalize(const Word& w) {
  std::int64_t p = 0;
  std::int64_t q = 0;
  for (Letter l : w.letters()) {
    const int sign = l > 0 ? 1 : -1;
    switch (generator_of(l)) {
      case 0: p += (q % 2 == 0) ? sign : -sign; break;
      case 1: q += sign; break;
      default: throw InvalidArgument("Klein bottle words use only a and t");
    }
  }
  return {p, q};
}

KleinKey klein_multiply(const KleinKey& x, const KleinKey& y) {
  return {x.first + (x.second % 2 == 0 ? y.first : -y.first), x.second + y.second};
}

namespace {

std::vector<Complex> unit_roots(std::uint64_t q) {
  std::vector<Complex> table(q);
  for (std::uint64_t j = 0; j < q; ++j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(q);
    table[j] = {std::cos(theta), std::sin(theta)};
  }
  return table;
}

std::uint64_t mod(std::int64_t x, std::uint64_t q) {
  const auto m = static_cast<std::int64_t>(q);
  const std::int64_t r = x % m;
  return static_cast<std::uint64_t>(r < 0 ? r + m : r);
}

std::int64_t floor_half(std::int64_t k) { return k >= 0 ? k / 2 : -((-k + 1) / 2); }

void check_grid(std::uint64_t q, std::size_t dims, std::uint64_t cap) {
  if (q < 1) throw InvalidArgument("grid order must be at least 1");
  unsigned __int128 points = 1;
  for (std::size_t i = 0; i < dims; ++i) {
    points *= q;
    if (points > cap) {
      throw SizeLimitError(fmt::format("grid has more than {} points", cap), std::numeric_limits<std::uint64_t>::max(),
                           cap);
    }
  }
}

}  // namespace

double zr_norm(const ZrElement& z, std::uint64_t q, std::uint64_t cap) {
  check_grid(q, z.rank, cap);
  if (z.coeffs.empty()) return 0.0;
  const auto roots = unit_roots(q);
  std::vector<std::vector<std::uint64_t>> keys;
  std::vector<Complex> coeffs;
  for (const auto& [v, c] : z.coeffs) {
    std::vector<std::uint64_t> k;
    for (auto x : v) k.push_back(mod(x, q));
    keys.push_back(std::move(k));
    coeffs.push_back(c);
  }
  std::uint64_t inner = 1;
  for (std::size_t i = 1; i < z.rank; ++i) inner *= q;
  std::vector<double> row_max(q, 0.0);
  parallel_for(q, [&](std::size_t j0) {
    std::vector<std::uint64_t> x(z.rank, 0);
    x[0] = j0;
    double best = 0.0;
    for (std::uint64_t idx = 0; idx < inner; ++idx) {
      std::uint64_t rest = idx;
      for (std::size_t d = 1; d < z.rank; ++d) {
        x[d] = rest % q;
        rest /= q;
      }
      Complex s{};
      for (std::size_t t = 0; t < keys.size(); ++t) {
        std::uint64_t phase = 0;
        for (std::size_t d = 0; d < z.rank; ++d) phase = (phase + keys[t][d] * x[d]) % q;
        s += coeffs[t] * roots[phase];
      }
      best = std::max(best, std::abs(s));
    }
    row_max[j0] = best;
  });
  return *std::max_element(row_max.begin(), row_max.end());
}

double op_norm_2x2(const Mat2& m) {
  // Largest eigenvalue of the Gram matrix [[p, r], [conj r, s]]; this form
  // avoids the cancellation in tr^2 - 4 det when singular values are close.
  const double p = std::norm(m[0]) + std::norm(m[2]);
  const double s = std::norm(m[1]) + std::norm(m[3]);
  const Complex r = std::conj(m[0]) * m[1] + std::conj(m[2]) * m[3];
  const double half_gap = 0.5 * (p - s);
  return std::sqrt(0.5 * (p + s) + std::sqrt(half_gap * half_gap + std::norm(r)));
}

Mat2 klein_matrix(const KleinKey& key, double alpha, double beta) {
  const auto [p, k] = key;
  const Complex x = std::polar(1.0, static_cast<double>(p) * alpha);
  const Complex scale = std::polar(1.0, static_cast<double>(floor_half(k)) * beta);
  if (k % 2 == 0) return {scale * x, 0.0, 0.0, scale * std::conj(x)};
  return {0.0, scale * x * std::polar(1.0, beta), scale * std::conj(x), 0.0};
}

namespace {

Mat2 multiply(const Mat2& x, const Mat2& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
}

double deviation(const Mat2& x, const Mat2& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < 4; ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

}  // namespace

double klein_relation_residual(std::uint64_t q) {
  check_grid(q, 2, kDefaultGridCap);
  double worst = 0.0;
  for (std::uint64_t j = 0; j < q; ++j) {
    const double alpha = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(q);
    for (std::uint64_t l = 0; l < q; ++l) {
      const double beta = 2.0 * std::numbers::pi * static_cast<double>(l) / static_cast<double>(q);
      const Mat2 a = klein_matrix({1, 0}, alpha, beta);
      const Mat2 a_inv = klein_matrix({-1, 0}, alpha, beta);
      const Mat2 t = klein_matrix({0, 1}, alpha, beta);
      const Mat2 t_inv = klein_matrix({0, -1}, alpha, beta);
      const Complex eb = std::polar(1.0, beta);
      worst = std::max(worst, deviation(multiply(multiply(t, a), t_inv), a_inv));
      worst = std::max(worst, deviation(multiply(t, t), {eb, 0.0, 0.0, eb}));
      worst = std::max(worst, deviation(multiply(t, t_inv), {1.0, 0.0, 0.0, 1.0}));
      worst = std::max(worst, deviation(multiply(a, a_inv), {1.0, 0.0, 0.0, 1.0}));
    }
  }
  return worst;
}

double klein_norm(const KleinElement& z, std::uint64_t q, std::uint64_t cap) {
  check_grid(q, 2, cap);
  if (z.coeffs.empty()) return 0.0;
  const auto roots = unit_roots(q);
  struct Term {
    std::uint64_t p;
    std::uint64_t s;
    bool odd;
    Complex c;
  };
  std::vector<Term> terms;
  for (const auto& [key, c] : z.coeffs) {
    terms.push_back({mod(key.first, q), mod(floor_half(key.second), q), key.second % 2 != 0, c});
  }
  std::vector<double> row_max(q, 0.0);
  parallel_for(q, [&](std::size_t j) {
    double best = 0.0;
    for (std::uint64_t l = 0; l < q; ++l) {
      Mat2 f{};
      for (const auto& t : terms) {
        const Complex x = roots[(t.p * j) % q];
        const Complex xbar = roots[(q - (t.p * j) % q) % q];
        const Complex scale = t.c * roots[(t.s * l) % q];
        if (t.odd) {
          f[1] += scale * x * roots[l];
          f[2] += scale * xbar;
        } else {
          f[0] += scale * x;
          f[3] += scale * xbar;
        }
      }
      best = std::max(best, op_norm_2x2(f));
    }
    row_max[j] = best;
  });
  return *std::max_element(row_max.begin(), row_max.end());
}

ZrElement pushdown(const KleinElement& z) {
  ZrElement out;
  for (const auto& [key, c] : z.coeffs) {
    if (key.second != 0) throw InvalidArgument("element is not supported on <a>");
    out.coeffs[{key.first}] += c;
  }
  return out;
}

AlgebraElement as_free(const ZrElement& z, const Basis& basis) {
  if (z.rank != 1 || basis.rank() != 1) throw ContextMismatch("only C[Z] embeds in the rank-one free group");
  std::vector<std::pair<Word, Complex>> terms;
  for (const auto& [v, c] : z.coeffs) terms.emplace_back(power(Word::generator(0), v[0]), c);
  return AlgebraElement::from_terms(Context::free(basis), std::move(terms));
}

namespace {

template <typename Element, typename Norm>
std::vector<RefineRow> refine(const Element& z, std::uint64_t q0, std::size_t levels, Norm norm) {
  if (q0 < 1) throw InvalidArgument("grid order must be at least 1");
  std::vector<RefineRow> rows;
  std::uint64_t q = q0;
  for (std::size_t i = 0; i <= levels; ++i, q *= 2) {
    const double n = norm(z, q);
    rows.push_back({q, n, rows.empty() ? 0.0 : std::abs(n - rows.back().norm)});
  }
  return rows;
}

struct Line {
  std::size_t number;
  std::vector<std::string_view> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++number;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    Line l{number, {}};
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      const std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i > start) l.tokens.push_back(line.substr(start, i - start));
    }
    if (!l.tokens.empty()) out.push_back(std::move(l));
  }
  return out;
}

template <typename T>
T number(std::string_view token, std::size_t line) {
  T value{};
  const char* first = token.data() + (token.starts_with('+') ? 1 : 0);
  auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw InvalidArgument(fmt::format("line {}: expected a number, got '{}'", line, token));
  }
  return value;
}

}  // namespace

std::vector<RefineRow> refine_zr(const ZrElement& z, std::uint64_t q0, std::size_t levels, std::uint64_t cap) {
  return refine(z, q0, levels, [cap](const ZrElement& e, std::uint64_t q) { return zr_norm(e, q, cap); });
}

std::vector<RefineRow> refine_klein(const KleinElement& z, std::uint64_t q0, std::size_t levels, std::uint64_t cap) {
  return refine(z, q0, levels, [cap](const KleinElement& e, std::uint64_t q) { return klein_norm(e, q, cap); });
}

ZrElement parse_zr(std::string_view text) {
  ZrElement out;
  std::size_t rank = 0;
  for (const auto& l : tokenize(text)) {
    if (l.tokens.size() < 3) throw InvalidArgument(fmt::format("line {}: expected RE IM k1 ... kr", l.number));
    if (rank == 0) rank = l.tokens.size() - 2;
    if (l.tokens.size() - 2 != rank) throw InvalidArgument(fmt::format("line {}: expected {} exponents", l.number, rank));
    std::vector<std::int64_t> key;
    for (std::size_t i = 2; i < l.tokens.size(); ++i) key.push_back(number<std::int64_t>(l.tokens[i], l.number));
    out.coeffs[key] += Complex(number<double>(l.tokens[0], l.number), number<double>(l.tokens[1], l.number));
  }
  out.rank = rank == 0 ? 1 : rank;
  std::erase_if(out.coeffs, [](const auto& kv) { return kv.second == Complex{}; });
  return out;
}

KleinElement parse_klein(std::string_view text) {
  KleinElement out;
  for (const auto& l : tokenize(text)) {
    if (l.tokens.size() != 4) throw InvalidArgument(fmt::format("line {}: expected RE IM p q", l.number));
    const KleinKey key{number<std::int64_t>(l.tokens[2], l.number), number<std::int64_t>(l.tokens[3], l.number)};
    out.coeffs[key] += Complex(number<double>(l.tokens[0], l.number), number<double>(l.tokens[1], l.number));
  }
  std::erase_if(out.coeffs, [](const auto& kv) { return kv.second == Complex{}; });
  return out;
}

std::string refine_csv(const std::vector<RefineRow>& rows) {
  std::string out = csv_preamble("q,norm,change");
  for (const auto& r : rows) out += fmt::format("{},{},{}\n", r.q, format_real(r.norm), format_real(r.change));
  return out;
}

}  // namespace residua
