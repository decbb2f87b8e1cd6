#include "residua/algebra.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <fstream>
#include <limits>

#include <unistd.h>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "residua/error.hpp"

namespace residua {

AlgebraElement::AlgebraElement(Context context) : context_(std::move(context)) {}

AlgebraElement AlgebraElement::zero_matrix(Context context, std::size_t dim) {
  if (dim == 0) throw InvalidArgument("matrix dimension must be positive");
  AlgebraElement out(std::move(context));
  out.dim_ = dim;
  out.matrix_ = true;
  return out;
}

AlgebraElement AlgebraElement::delta(Context context, const Word& w, Complex c) {
  return from_terms(std::move(context), {{w, c}});
}

AlgebraElement AlgebraElement::from_terms(Context context, std::vector<std::pair<Word, Complex>> terms) {
  TermAccumulator acc(std::move(context), 1, false);
  for (const auto& [w, c] : terms) *acc.slot(w.letters()) += c;
  return std::move(acc).finish();
}

AlgebraElement AlgebraElement::from_matrix_terms(Context context, std::size_t dim,
                                                 std::vector<std::pair<Word, std::vector<Complex>>> terms) {
  if (dim == 0) throw InvalidArgument("matrix dimension must be positive");
  TermAccumulator acc(std::move(context), dim, true);
  for (const auto& [w, block] : terms) {
    if (block.size() != dim * dim) {
      throw ContextMismatch(fmt::format("matrix coefficient has {} entries, expected {}", block.size(), dim * dim));
    }
    Complex* slot = acc.slot(w.letters());
    for (std::size_t i = 0; i < block.size(); ++i) slot[i] += block[i];
  }
  return std::move(acc).finish();
}

std::optional<std::span<const Complex>> AlgebraElement::find(const Word& w) const {
  auto it = std::lower_bound(words_.begin(), words_.end(), w);
  if (it == words_.end() || !(*it == w)) return std::nullopt;
  return coefficient(static_cast<std::size_t>(it - words_.begin()));
}

Complex AlgebraElement::at(const Word& w) const {
  auto c = find(w);
  return c ? (*c)[0] : Complex{};
}

AlgebraElement AlgebraElement::scaled(Complex factor) const {
  TermAccumulator acc(context_, dim_, matrix_);
  for (std::size_t t = 0; t < words_.size(); ++t) {
    Complex* slot = acc.slot(words_[t].letters());
    const auto c = coefficient(t);
    for (std::size_t i = 0; i < c.size(); ++i) slot[i] = c[i] * factor;
  }
  return std::move(acc).finish();
}

AlgebraElement AlgebraElement::with_context(Context context) const {
  if (context.basis.rank() != context_.basis.rank()) throw ContextMismatch("context rank differs");
  AlgebraElement out = *this;
  out.context_ = std::move(context);
  return out;
}

namespace {

void require_compatible(const AlgebraElement& a, const AlgebraElement& b) {
  if (!(a.context() == b.context())) throw ContextMismatch("elements live in different contexts");
  if (a.is_matrix() != b.is_matrix() || a.dim() != b.dim()) {
    throw ContextMismatch("elements have incompatible coefficient kinds");
  }
}

AlgebraElement combine(const AlgebraElement& a, const AlgebraElement& b, double sign) {
  require_compatible(a, b);
  TermAccumulator acc(a.context(), a.dim(), a.is_matrix());
  for (std::size_t t = 0; t < a.size(); ++t) {
    Complex* slot = acc.slot(a.support()[t].letters());
    const auto c = a.coefficient(t);
    for (std::size_t i = 0; i < c.size(); ++i) slot[i] += c[i];
  }
  for (std::size_t t = 0; t < b.size(); ++t) {
    Complex* slot = acc.slot(b.support()[t].letters());
    const auto c = b.coefficient(t);
    for (std::size_t i = 0; i < c.size(); ++i) slot[i] += sign * c[i];
  }
  return std::move(acc).finish();
}

}  // namespace

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) { return combine(a, b, 1.0); }
AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) { return combine(a, b, -1.0); }

namespace {

// Bytes the process may still allocate: free physical memory, further limited
// by a cgroup v2 limit when one is set.
std::uint64_t available_memory() {
  const long pages = sysconf(_SC_AVPHYS_PAGES);
  const long page = sysconf(_SC_PAGESIZE);
  std::uint64_t bytes = pages > 0 && page > 0 ? static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page)
                                              : std::numeric_limits<std::uint64_t>::max();
  std::ifstream max_file("/sys/fs/cgroup/memory.max");
  std::ifstream cur_file("/sys/fs/cgroup/memory.current");
  std::uint64_t limit = 0;
  std::uint64_t current = 0;
  if (max_file >> limit && cur_file >> current && limit > current) bytes = std::min(bytes, limit - current);
  return bytes;
}

constexpr std::uint32_t kEmptySlot = std::numeric_limits<std::uint32_t>::max();

}  // namespace

struct TermAccumulator::Impl {
  Context context;
  std::size_t dim;
  bool matrix;
  std::uint64_t cap;
  std::uint64_t budget = 0;  // bytes
  std::uint64_t used = 0;
  // Open addressing over term ids; the words themselves are stored once.
  std::vector<std::uint32_t> table;
  std::vector<Word> words;
  std::vector<Complex> coeffs;

  std::size_t probe(std::span<const Letter> word, std::size_t hash) const {
    const std::size_t mask = table.size() - 1;
    for (std::size_t i = hash & mask;; i = (i + 1) & mask) {
      const std::uint32_t id = table[i];
      if (id == kEmptySlot || WordEqual{}(words[id], word)) return i;
    }
  }

  void grow() {
    std::vector<std::uint32_t> next(std::max<std::size_t>(16, table.size() * 2), kEmptySlot);
    table.swap(next);
    const std::size_t mask = table.size() - 1;
    for (std::uint32_t id : next) {
      if (id == kEmptySlot) continue;
      std::size_t i = WordHash{}(words[id]) & mask;
      while (table[i] != kEmptySlot) i = (i + 1) & mask;
      table[i] = id;
    }
  }
};

TermAccumulator::TermAccumulator(Context context, std::size_t dim, bool matrix, std::uint64_t term_cap)
    : impl_(std::make_shared<Impl>()) {
  auto& s = *impl_;
  s.context = std::move(context);
  s.dim = dim;
  s.matrix = matrix;
  s.cap = std::min<std::uint64_t>(term_cap, kEmptySlot - 1);
  // Leave headroom for finish(), which copies the coefficients and sorts ids.
  s.budget = available_memory() / 10 * 6;
}

Complex* TermAccumulator::slot(std::span<const Letter> word) {
  auto& s = *impl_;
  const std::size_t block = s.dim * s.dim;
  if ((s.words.size() + 1) * 2 > s.table.size()) s.grow();
  const std::size_t pos = s.probe(word, WordHash{}(word));
  if (s.table[pos] != kEmptySlot) return s.coeffs.data() + std::size_t{s.table[pos]} * block;
  if (s.words.size() >= s.cap) {
    throw SizeLimitError(fmt::format("term count exceeds cap {}", s.cap), s.words.size() + 1, s.cap);
  }
  // Word header, heap letters with allocator overhead, coefficients, index and
  // sort order. Vector growth is covered by the headroom in the budget.
  s.used += sizeof(Word) + 16 + ((word.size() * sizeof(Letter) + 15) / 16) * 16 + 2 * block * sizeof(Complex) + 16;
  if (s.used > s.budget) {
    throw SizeLimitError(fmt::format("term storage would exceed the memory budget of {} bytes", s.budget),
                         s.words.size() + 1, s.words.size());
  }
  const auto id = static_cast<std::uint32_t>(s.words.size());
  s.words.push_back(Word::from_reduced({word.begin(), word.end()}));
  s.table[pos] = id;
  s.coeffs.resize(s.coeffs.size() + block);
  return s.coeffs.data() + std::size_t{id} * block;
}

std::size_t TermAccumulator::size() const noexcept { return impl_->words.size(); }

AlgebraElement TermAccumulator::finish() && {
  auto& s = *impl_;
  std::vector<std::uint32_t>().swap(s.table);
  const std::size_t block = s.dim * s.dim;
  std::vector<std::size_t> order(s.words.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return s.words[x] < s.words[y]; });
  AlgebraElement out(s.context);
  out.dim_ = s.dim;
  out.matrix_ = s.matrix;
  out.words_.reserve(order.size());
  out.coeffs_.reserve(order.size() * block);
  for (std::size_t id : order) {
    const Complex* c = s.coeffs.data() + id * block;
    if (std::all_of(c, c + block, [](Complex z) { return z == Complex{}; })) continue;
    out.words_.push_back(std::move(s.words[id]));
    out.coeffs_.insert(out.coeffs_.end(), c, c + block);
  }
  return out;
}

AlgebraElement convolve(const AlgebraElement& a, const AlgebraElement& b, std::uint64_t term_cap) {
  require_compatible(a, b);
  if (a.context().kind != GroupKind::Free) {
    throw ContextMismatch("convolution needs a free context; push the element forward first");
  }
  const std::size_t r = a.dim();
  TermAccumulator acc(a.context(), r, a.is_matrix(), term_cap);
  std::vector<Letter> buffer;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto u = a.support()[i].letters();
    const auto ca = a.coefficient(i);
    for (std::size_t j = 0; j < b.size(); ++j) {
      const auto v = b.support()[j].letters();
      const std::size_t k = cancellation(u, v);
      buffer.assign(u.begin(), u.end() - static_cast<std::ptrdiff_t>(k));
      buffer.insert(buffer.end(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
      Complex* slot = acc.slot(buffer);
      const auto cb = b.coefficient(j);
      if (r == 1) {
        slot[0] += ca[0] * cb[0];
      } else {
        for (std::size_t row = 0; row < r; ++row) {
          for (std::size_t mid = 0; mid < r; ++mid) {
            const Complex x = ca[row * r + mid];
            if (x == Complex{}) continue;
            for (std::size_t col = 0; col < r; ++col) slot[row * r + col] += x * cb[mid * r + col];
          }
        }
      }
    }
  }
  return std::move(acc).finish();
}

AlgebraElement star(const AlgebraElement& a) {
  const std::size_t r = a.dim();
  TermAccumulator acc(a.context(), r, a.is_matrix());
  for (std::size_t t = 0; t < a.size(); ++t) {
    const Word inv = inverse(a.support()[t]);
    Complex* slot = acc.slot(inv.letters());
    const auto c = a.coefficient(t);
    for (std::size_t row = 0; row < r; ++row) {
      for (std::size_t col = 0; col < r; ++col) slot[col * r + row] = std::conj(c[row * r + col]);
    }
  }
  return std::move(acc).finish();
}

double matrix_op_norm(std::span<const Complex> m, std::size_t dim) {
  if (dim == 1) return std::abs(m[0]);
  Eigen::MatrixXcd mat(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i * dim + j];
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(mat);
  return svd.singularValues()(0);
}

double l1(const AlgebraElement& a) {
  double total = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) total += matrix_op_norm(a.coefficient(t), a.dim());
  return total;
}

double l2(const AlgebraElement& a) {
  double total = 0.0;
  for (const Complex& c : a.raw_coefficients()) total += std::norm(c);
  return std::sqrt(total);
}

double column_l2(const AlgebraElement& a) {
  if (!a.is_matrix()) return l2(a);
  const auto r = static_cast<Eigen::Index>(a.dim());
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(r, r);
  for (std::size_t t = 0; t < a.size(); ++t) {
    const auto c = a.coefficient(t);
    Eigen::MatrixXcd m(r, r);
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < r; ++j) m(i, j) = c[static_cast<std::size_t>(i * r + j)];
    }
    gram += m.adjoint() * m;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

std::size_t max_word_length(const AlgebraElement& a) {
  std::size_t r = 0;
  for (const auto& w : a.support()) r = std::max(r, w.length());
  return r;
}

std::size_t support_radius(const AlgebraElement& a) {
  if (a.context().kind != GroupKind::Free) throw ContextMismatch("support radius needs a free context");
  if (a.is_zero()) throw InvalidArgument("the zero element has no support radius");
  return a.support().back().length();
}

AlgebraElement pushforward(const Homomorphism& phi, const AlgebraElement& a) {
  if (!(phi.domain() == a.context().basis)) throw ContextMismatch("homomorphism domain differs from element context");
  TermAccumulator acc(Context::free(phi.codomain()), a.dim(), a.is_matrix());
  for (std::size_t t = 0; t < a.size(); ++t) {
    const Word image = phi.apply(a.support()[t]);
    Complex* slot = acc.slot(image.letters());
    const auto c = a.coefficient(t);
    for (std::size_t i = 0; i < c.size(); ++i) slot[i] += c[i];
  }
  return std::move(acc).finish();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Pops the next whitespace-delimited token off the front of `line`.
std::string_view next_token(std::string_view& line) {
  line = trim(line);
  std::size_t end = 0;
  while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
  auto token = line.substr(0, end);
  line.remove_prefix(end);
  return token;
}

template <typename T>
T parse_number(std::string_view token, std::size_t line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
    throw InvalidArgument(fmt::format("line {}: expected a number, got '{}'", line_no, token));
  }
  return value;
}

}  // namespace

AlgebraElement parse_element(const Context& context, std::string_view text) {
  std::vector<std::pair<Word, Complex>> scalar_terms;
  std::vector<std::pair<Word, std::vector<Complex>>> matrix_terms;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  bool seen_term = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.starts_with("matdim")) {
      if (seen_term || dim != 0) throw InvalidArgument(fmt::format("line {}: matdim must precede all terms", line_no));
      line.remove_prefix(6);
      dim = parse_number<std::size_t>(next_token(line), line_no);
      if (dim == 0 || !trim(line).empty()) throw InvalidArgument(fmt::format("line {}: bad matdim header", line_no));
      continue;
    }
    seen_term = true;
    const double re = parse_number<double>(next_token(line), line_no);
    const double im = parse_number<double>(next_token(line), line_no);
    if (dim == 0) {
      scalar_terms.emplace_back(parse_word(context.basis, trim(line)), Complex(re, im));
    } else {
      const auto row = parse_number<std::size_t>(next_token(line), line_no);
      const auto col = parse_number<std::size_t>(next_token(line), line_no);
      if (row >= dim || col >= dim) throw InvalidArgument(fmt::format("line {}: entry outside matdim", line_no));
      std::vector<Complex> block(dim * dim);
      block[row * dim + col] = Complex(re, im);
      matrix_terms.emplace_back(parse_word(context.basis, trim(line)), std::move(block));
    }
  }
  if (dim == 0) return AlgebraElement::from_terms(context, std::move(scalar_terms));
  if (matrix_terms.empty()) return AlgebraElement::zero_matrix(context, dim);
  return AlgebraElement::from_matrix_terms(context, dim, std::move(matrix_terms));
}

std::string format_element(const AlgebraElement& a) {
  std::string out;
  const auto& basis = a.context().basis;
  auto suffix = [&](const Word& w) {
    auto text = format_word(basis, w);
    return text.empty() ? text : " " + text;
  };
  if (!a.is_matrix()) {
    for (std::size_t t = 0; t < a.size(); ++t) {
      const Complex c = a.coefficient(t)[0];
      out += fmt::format("{:.17g} {:.17g}{}\n", c.real() + 0.0, c.imag() + 0.0, suffix(a.support()[t]));
    }
    return out;
  }
  const std::size_t r = a.dim();
  out += fmt::format("matdim {}\n", r);
  for (std::size_t t = 0; t < a.size(); ++t) {
    const auto c = a.coefficient(t);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < r; ++j) {
        const Complex z = c[i * r + j];
        if (z == Complex{}) continue;
        out += fmt::format("{:.17g} {:.17g} {} {}{}\n", z.real() + 0.0, z.imag() + 0.0, i, j, suffix(a.support()[t]));
      }
    }
  }
  return out;
}

}  // namespace residua
