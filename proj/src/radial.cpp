#include "residua/radial.hpp"

#include <cmath>

#include "residua/error.hpp"

namespace residua {

double log_sphere_size(std::size_t rank, std::size_t n) {
  if (n == 0) return 0.0;
  const double k2 = 2.0 * static_cast<double>(rank);
  return std::log(k2) + static_cast<double>(n - 1) * std::log(k2 - 1.0);
}

std::optional<RadialElement> as_radial(const AlgebraElement& a) {
  if (a.is_matrix() || a.context().kind != GroupKind::Free || a.is_zero()) return std::nullopt;
  const std::size_t rank = a.context().basis.rank();
  RadialElement out{rank, std::vector<Complex>(max_word_length(a) + 1)};
  const auto& words = a.support();
  std::size_t t = 0;
  while (t < words.size()) {
    const std::size_t n = words[t].length();
    const Complex c = a.coefficient(t)[0];
    std::size_t count = 0;
    for (; t < words.size() && words[t].length() == n; ++t, ++count) {
      if (a.coefficient(t)[0] != c) return std::nullopt;
    }
    if (count != sphere_size(rank, n)) return std::nullopt;
    out.mass[n] = c * std::exp(0.5 * log_sphere_size(rank, n));
  }
  return out;
}

namespace {

// Number of ways to write a fixed word of length l as x y with |x| = n,
// |y| = m, scaled by sqrt(|S(l)| / (|S(n)| |S(m)|)). Zero when impossible.
double kernel(std::size_t rank, std::size_t n, std::size_t m, std::size_t l) {
  const std::size_t j = (n + m - l) / 2;
  const double ls = 0.5 * (log_sphere_size(rank, l) - log_sphere_size(rank, n) - log_sphere_size(rank, m));
  if (j == 0) return std::exp(ls);
  const double k2 = 2.0 * static_cast<double>(rank);
  const double first = k2 - (n > j ? 1.0 : 0.0) - (m > j ? 1.0 : 0.0);
  if (first <= 0.0) return 0.0;
  return std::exp(std::log(first) + static_cast<double>(j - 1) * std::log(k2 - 1.0) + ls);
}

}  // namespace

RadialElement radial_convolve(const RadialElement& a, const RadialElement& b) {
  if (a.rank != b.rank) throw ContextMismatch("radial elements of different rank");
  RadialElement out{a.rank, std::vector<Complex>(a.mass.size() + b.mass.size() - 1)};
  for (std::size_t n = 0; n < a.mass.size(); ++n) {
    if (a.mass[n] == Complex{}) continue;
    for (std::size_t m = 0; m < b.mass.size(); ++m) {
      if (b.mass[m] == Complex{}) continue;
      const Complex x = a.mass[n] * b.mass[m];
      const std::size_t lo = n > m ? n - m : m - n;
      for (std::size_t l = lo; l <= n + m; l += 2) out.mass[l] += x * kernel(a.rank, n, m, l);
    }
  }
  return out;
}

RadialElement radial_star(const RadialElement& a) {
  RadialElement out = a;
  for (auto& c : out.mass) c = std::conj(c);
  return out;
}

RadialElement radial_scaled(const RadialElement& a, double factor) {
  RadialElement out = a;
  for (auto& c : out.mass) c *= factor;
  return out;
}

double radial_l2(const RadialElement& a) {
  double total = 0.0;
  for (const auto& c : a.mass) total += std::norm(c);
  return std::sqrt(total);
}

std::size_t radial_radius(const RadialElement& a) {
  for (std::size_t n = a.mass.size(); n-- > 0;) {
    if (a.mass[n] != Complex{}) return n;
  }
  return 0;
}

AlgebraElement expand(const RadialElement& a, const Context& context, std::uint64_t cap) {
  if (context.basis.rank() != a.rank) throw ContextMismatch("radial element rank differs from context");
  TermAccumulator acc(context, 1, false);
  for (const Word& w : ball(a.rank, radial_radius(a), cap)) {
    const Complex c = a.mass[w.length()] * std::exp(-0.5 * log_sphere_size(a.rank, w.length()));
    if (c != Complex{}) *acc.slot(w.letters()) = c;
  }
  return std::move(acc).finish();
}

}  // namespace residua
