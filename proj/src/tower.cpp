#include "residua/tower.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "residua/error.hpp"
#include "residua/parallel.hpp"

namespace residua {

Tower::Tower(Basis base, std::vector<LevelSpec> levels) : base_(std::move(base)) {
  if (base_.rank() == 0) throw InvalidArgument("tower base must have at least one generator");
  std::vector<std::string> names = base_.names();
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& spec = levels[i];
    const Basis below(names);
    Level level;
    level.u = parse_word(below, spec.u);
    if (level.u.empty()) throw InvalidArgument(fmt::format("level {}: u must be nontrivial", i + 1));
    level.a = spec.a.empty() ? level.u : parse_word(below, spec.a);
    const auto e = level.a.empty() ? std::nullopt : power_exponent(level.a, level.u);
    if (!e) throw InvalidArgument(fmt::format("level {}: a must be a nontrivial power of u", i + 1));
    level.a_exponent = *e;
    level.t = spec.t;
    names.push_back(spec.t);  // Basis validates freshness and the identifier syntax.
    full_ = Basis(names);
    levels_.push_back(std::move(level));
  }
  if (levels_.empty()) full_ = base_;
}

Basis Tower::basis_at(std::size_t level) const {
  if (level > height()) throw InvalidArgument(fmt::format("level {} exceeds tower height {}", level, height()));
  const auto& names = full_.names();
  return Basis(std::vector<std::string>(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(base_.rank() + level)));
}

const Level& Tower::level(std::size_t i) const {
  if (i < 1 || i > height()) throw InvalidArgument(fmt::format("level {} out of range 1..{}", i, height()));
  return levels_[i - 1];
}

std::vector<Word> Tower::relators() const {
  std::vector<Word> out;
  for (std::size_t i = 1; i <= height(); ++i) out.push_back(commutator(Word::generator(stable_index(i)), level(i).u));
  return out;
}

Homomorphism Subgroup::inclusion(const Tower& tower) const {
  return Homomorphism(names, tower.full_basis(), gens);
}

Subgroup make_subgroup(const Tower& tower, std::vector<std::string> names, const std::vector<std::string>& gens) {
  if (gens.empty()) throw InvalidArgument("subgroup needs at least one generator");
  if (names.empty()) {
    for (std::size_t i = 0; i < gens.size(); ++i) names.push_back(fmt::format("y{}", i + 1));
  }
  if (names.size() != gens.size()) throw InvalidArgument("subgroup names and gens differ in length");
  Subgroup out{Basis(std::move(names)), {}};
  for (const auto& g : gens) out.gens.push_back(parse_word(tower.full_basis(), g));
  return out;
}

Homomorphism retraction_pi(const Tower& tower, std::size_t level) {
  tower.level(level);
  const Basis domain = tower.basis_at(level);
  std::vector<Word> images;
  for (std::size_t i = 0; i + 1 < domain.rank(); ++i) images.push_back(Word::generator(i));
  images.emplace_back();
  return Homomorphism(domain, tower.basis_at(level - 1), std::move(images));
}

Homomorphism twist_tau(const Tower& tower, std::size_t level, std::int64_t m) {
  if (m <= 0) throw InvalidArgument("twist exponent must be positive");
  const Level& lv = tower.level(level);
  const Basis domain = tower.basis_at(level);
  std::vector<Word> images;
  for (std::size_t i = 0; i < domain.rank(); ++i) images.push_back(Word::generator(i));
  images.back() = images.back() * power(lv.a, m);
  return Homomorphism(domain, domain, std::move(images));
}

namespace {

// Syllable decomposition g0 t^{e1} g1 ... t^{ek} gk with pinches applied
// whenever a syllable between two t-powers lies in <u>.
struct Pinched {
  Word head;
  std::vector<std::pair<std::int64_t, Word>> tail;
};

Pinched pinch(const Tower& tower, const Word& w) {
  if (tower.height() < 1) throw InvalidArgument("height-1 operations need a tower of height at least 1");
  const Word& u = tower.level(1).u;
  const auto t = static_cast<Letter>(tower.stable_index(1) + 1);
  validate(w, tower.base().rank() + 1);

  Pinched out;
  auto trailing = [&]() -> Word& { return out.tail.empty() ? out.head : out.tail.back().second; };
  auto push = [&](std::int64_t e, Word g) {
    if (!out.tail.empty()) {
      auto& top = out.tail.back();
      if (auto alpha = power_exponent(top.second, u)) {
        // t^f u^alpha t^e g = t^(f+e) u^alpha g
        Word moved = power(u, *alpha) * g;
        const std::int64_t f = top.first + e;
        if (f != 0) {
          top = {f, std::move(moved)};
        } else {
          out.tail.pop_back();
          Word& prev = trailing();
          prev = prev * moved;
        }
        return;
      }
    }
    out.tail.emplace_back(e, std::move(g));
  };

  const auto letters = w.letters();
  std::size_t i = 0;
  auto read_block = [&] {
    std::vector<Letter> block;
    while (i < letters.size() && letters[i] != t && letters[i] != -t) block.push_back(letters[i++]);
    return Word::from_reduced(std::move(block));
  };
  out.head = read_block();
  while (i < letters.size()) {
    std::int64_t e = 0;
    while (i < letters.size() && (letters[i] == t || letters[i] == -t)) e += letters[i++] > 0 ? 1 : -1;
    push(e, read_block());
  }
  return out;
}

}  // namespace

NormalForm normal_form_h1(const Tower& tower, const Word& w) {
  Pinched p = pinch(tower, w);
  const Word& u = tower.level(1).u;
  if (!p.tail.empty()) {
    if (auto alpha = power_exponent(p.head, u)) {
      p.tail.front().second = power(u, *alpha) * p.tail.front().second;
      p.head = Word();
    }
  }
  NormalForm nf;
  if (p.tail.empty()) {
    if (auto alpha = power_exponent(p.head, u)) {
      nf.alpha = *alpha;
      return nf;
    }
  } else if (p.tail.size() == 1 && p.head.empty()) {
    if (auto alpha = power_exponent(p.tail.front().second, u)) {
      nf.n = p.tail.front().first;
      nf.alpha = *alpha;
      return nf;
    }
  }
  nf.kind = NormalForm::Kind::Alternating;
  if (!p.head.empty()) nf.syllables.emplace_back(0, std::move(p.head));
  for (auto& s : p.tail) nf.syllables.push_back(std::move(s));
  return nf;
}

Word NormalForm::recompose(const Tower& tower) const {
  const Word t = Word::generator(tower.stable_index(1));
  if (kind == Kind::Axial) return power(t, n) * power(tower.level(1).u, alpha);
  Word out;
  for (const auto& [e, v] : syllables) out = out * power(t, e) * v;
  return out;
}

bool trivial_h1(const Tower& tower, const Word& w) {
  const Pinched p = pinch(tower, w);
  return p.tail.empty() && p.head.empty();
}

bool equal_h1(const Tower& tower, const Word& w1, const Word& w2) {
  return trivial_h1(tower, w1 * inverse(w2));
}

BigFloat distortion_bound(const Tower& tower, std::size_t level, const BigFloat& r) {
  if (level == 0) return r;
  const auto a_len = static_cast<double>(tower.level(level).a.length());
  const BigFloat inner = distortion_bound(tower, level - 1, 2 * (r + a_len));
  return (8 * r * r + 4 * r) * inner * inner;
}

BigFloat distortion_bound(const Tower& tower, std::size_t r) {
  if (r < 1) throw InvalidArgument("distortion bound needs r >= 1");
  return distortion_bound(tower, tower.height(), BigFloat(r));
}

std::uint64_t degree(std::size_t height) {
  std::uint64_t d = 1;
  for (std::size_t i = 0; i < height; ++i) d = 2 * d + 2;
  return d;
}

std::uint64_t degree(const Tower& tower) { return degree(tower.height()); }

namespace {

std::int64_t to_exponent(const BigFloat& m) {
  const BigFloat limit(std::numeric_limits<std::int64_t>::max() / 4);
  if (m > limit) {
    throw SizeLimitError(fmt::format("twist exponent {} does not fit in 64 bits", m.str(6)),
                         std::numeric_limits<std::uint64_t>::max(), static_cast<std::uint64_t>(limit));
  }
  return m.convert_to<std::int64_t>();
}

}  // namespace

std::vector<std::int64_t> paper_exponents(const Tower& tower, std::size_t r) {
  if (r < 1) throw InvalidArgument("radius must be at least 1");
  std::vector<std::int64_t> m(tower.height());
  BigFloat ri(r);
  for (std::size_t i = tower.height(); i >= 1; --i) {
    const BigFloat big_l = 2 * (ri + static_cast<double>(tower.level(i).a.length()));
    m[i - 1] = to_exponent((4 * ri + 2) * 2 * distortion_bound(tower, i - 1, big_l));
    ri = big_l;
  }
  return m;
}

Homomorphism tower_hom(const Tower& tower, const std::vector<std::int64_t>& m, std::uint64_t image_cap) {
  if (m.size() != tower.height()) throw InvalidArgument("need one twist exponent per level");
  std::vector<Word> images;
  for (std::size_t i = 0; i < tower.base().rank(); ++i) images.push_back(Word::generator(i));
  for (std::size_t i = 1; i <= tower.height(); ++i) {
    if (m[i - 1] <= 0) throw InvalidArgument("twist exponents must be positive");
    const Homomorphism below(tower.basis_at(i - 1), tower.base(), images);
    const Word a = below.apply(tower.level(i).a);
    const auto predicted = static_cast<unsigned __int128>(a.length()) * static_cast<std::uint64_t>(m[i - 1]);
    if (predicted > image_cap) {
      const auto saturated = predicted > std::numeric_limits<std::uint64_t>::max()
                                 ? std::numeric_limits<std::uint64_t>::max()
                                 : static_cast<std::uint64_t>(predicted);
      throw SizeLimitError(fmt::format("image of {} would have {} letters (cap {})", tower.level(i).t,
                                       saturated, image_cap),
                           saturated, image_cap);
    }
    images.push_back(power(a, m[i - 1]));
  }
  return Homomorphism(tower.full_basis(), tower.base(), std::move(images));
}

namespace {

struct BallCheck {
  std::vector<Word> ywords;
  std::vector<Word> twords;
  std::vector<Word> images;
  std::vector<std::size_t> group;  // index of the first ball word with the same image
  std::size_t elements = 0;
};

BallCheck check_ball(const Tower& tower, const Subgroup& y, const Homomorphism& h, std::size_t r,
                     const DiscriminateOptions& options) {
  BallCheck c;
  c.ywords = ball(y.names.rank(), r, options.ball_cap);
  const Homomorphism inclusion = y.inclusion(tower);
  const std::size_t n = c.ywords.size();
  c.twords.resize(n);
  c.images.resize(n);
  parallel_for(n, [&](std::size_t i) {
    c.twords[i] = inclusion.apply(c.ywords[i]);
    c.images[i] = h.apply(c.twords[i]);
  });
  std::unordered_map<Word, std::size_t, WordHash, WordEqual> first;
  c.group.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, fresh] = first.emplace(c.images[i], i);
    c.group[i] = it->second;
    if (fresh) continue;
    const std::size_t j = it->second;
    if (c.twords[i] == c.twords[j]) continue;
    if (tower.height() == 1 && equal_h1(tower, c.twords[i], c.twords[j])) continue;
    const auto a = format_word(y.names, c.ywords[j]);
    const auto b = format_word(y.names, c.ywords[i]);
    if (tower.height() >= 2) {
      throw InvariantViolation(
          fmt::format("images of '{}' and '{}' coincide and equality above height 1 cannot be decided", a, b));
    }
    throw InjectivityError(fmt::format("'{}' and '{}' are distinct but have the same image", a, b), a, b);
  }
  c.elements = first.size();
  return c;
}

}  // namespace

Discrimination discriminating_hom(const Tower& tower, const Subgroup& y, std::size_t r,
                                  const DiscriminateOptions& options) {
  if (r < 1) throw InvalidArgument("radius must be at least 1");
  for (const auto& g : y.gens) validate(g, tower.full_basis().rank());
  std::vector<std::int64_t> m = paper_exponents(tower, r);

  if (options.tight) {
    for (std::size_t i = tower.height(); i >= 1; --i) {
      const std::int64_t paper = m[i - 1];
      for (std::int64_t candidate = 1; candidate <= paper; ++candidate) {
        m[i - 1] = candidate;
        try {
          check_ball(tower, y, tower_hom(tower, m, options.image_cap), r, options);
          break;
        } catch (const InvariantViolation&) {
          if (candidate == paper) throw;
        }
      }
    }
  }

  Homomorphism h = tower_hom(tower, m, options.image_cap);
  for (const Word& rel : tower.relators()) {
    if (!h.apply(rel).empty()) {
      throw InvariantViolation(fmt::format("relator {} is not killed", format_word(tower.full_basis(), rel)));
    }
  }
  const BallCheck c = check_ball(tower, y, h, r, options);

  std::size_t pairs = 0;
  const std::size_t n = c.ywords.size();
  if (tower.height() == 1 && n <= options.pair_check_limit) {
    std::vector<std::size_t> mismatch(n, n);
    parallel_for(n, [&](std::size_t i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (equal_h1(tower, c.twords[i], c.twords[j]) != (c.group[i] == c.group[j])) {
          mismatch[i] = j;
          return;
        }
      }
    });
    for (std::size_t i = 0; i < n; ++i) {
      if (mismatch[i] == n) continue;
      const auto a = format_word(y.names, c.ywords[i]);
      const auto b = format_word(y.names, c.ywords[mismatch[i]]);
      throw InjectivityError(fmt::format("height-1 equality and image equality disagree on '{}' and '{}'", a, b),
                             a, b);
    }
    pairs = n * (n - 1) / 2;
  }

  Discrimination out{y.inclusion(tower).then(h), h, m, r, n, c.elements, 0, pairs, distortion_bound(tower, r)};
  for (const auto& img : c.images) out.stretch = std::max(out.stretch, img.length());
  auto& meta = out.hom.metadata();
  meta.certified_radius = r;
  meta.stretch = out.stretch;
  meta.level_m = m;
  meta.ball_size = c.elements;
  out.tower_map.metadata() = meta;
  return out;
}

Preset preset_genus2() {
  Tower tower(Basis({"a", "b"}), {{"a b a^-1 b^-1", "t", ""}});
  Subgroup y = make_subgroup(tower, {"a", "b", "c", "d"}, {"a", "b", "t a t^-1", "t b t^-1"});
  return {std::move(tower), std::move(y)};
}

Preset preset_z2() {
  Tower tower(Basis({"a"}), {{"a", "t", ""}});
  Subgroup y = make_subgroup(tower, {"a", "t"}, {"a", "t"});
  return {std::move(tower), std::move(y)};
}

}  // namespace residua
