#pragma once

// Iterated extensions of centralizers F = G_0 < G_1 < ... < G_n with
// G_i = G_{i-1} *_{<u_i>} (<u_i> x <t_i>), and homomorphisms G_n -> F that are
// injective on a prescribed ball of a finitely generated subgroup.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "residua/bigfloat.hpp"
#include "residua/homomorphism.hpp"
#include "residua/words.hpp"

namespace residua {

/// A level as written by the user: words in the generators of the level below.
struct LevelSpec {
  std::string u;
  std::string t;
  /// Element of <u> used by the twist; empty means u.
  std::string a;
};

struct Level {
  Word u;
  std::string t;
  Word a;
  /// a = u^a_exponent.
  std::int64_t a_exponent = 1;
};

class Tower {
 public:
  Tower(Basis base, std::vector<LevelSpec> levels);

  std::size_t height() const noexcept { return levels_.size(); }
  const Basis& base() const noexcept { return base_; }
  /// Base generators followed by t_1..t_n.
  const Basis& full_basis() const noexcept { return full_; }
  /// Generators of G_level (0 <= level <= height).
  Basis basis_at(std::size_t level) const;
  /// 1-based.
  const Level& level(std::size_t i) const;
  /// Generator index of t_i in the full basis.
  std::size_t stable_index(std::size_t i) const { return base_.rank() + i - 1; }
  /// The commutators [t_i, u_i] as words over the full basis.
  std::vector<Word> relators() const;

 private:
  Basis base_;
  Basis full_;
  std::vector<Level> levels_;
};

/// Named generating set Y of a subgroup, as words over the tower's full basis.
struct Subgroup {
  Basis names;
  std::vector<Word> gens;

  /// The inclusion Y -> G_n.
  Homomorphism inclusion(const Tower& tower) const;
};

Subgroup make_subgroup(const Tower& tower, std::vector<std::string> names,
                       const std::vector<std::string>& gens);

/// G_level -> G_{level-1}, t_level -> e.
Homomorphism retraction_pi(const Tower& tower, std::size_t level);
/// G_level -> G_level, t_level -> t_level a^m, other generators fixed.
Homomorphism twist_tau(const Tower& tower, std::size_t level, std::int64_t m);

/// Height-1 normal forms: either prod t^{n_i} v_i with interior v_i outside <u>
/// and interior n_i != 0, or the axial element t^n u^alpha.
struct NormalForm {
  enum class Kind { Alternating, Axial };
  Kind kind = Kind::Axial;
  std::vector<std::pair<std::int64_t, Word>> syllables;
  std::int64_t n = 0;
  std::int64_t alpha = 0;

  /// Product as a word over the G_1 basis.
  Word recompose(const Tower& tower) const;
  friend bool operator==(const NormalForm&, const NormalForm&) = default;
};

/// Words must lie in G_1 (base generators and t_1).
NormalForm normal_form_h1(const Tower& tower, const Word& w);
bool equal_h1(const Tower& tower, const Word& w1, const Word& w2);
/// True iff w is trivial in G_1.
bool trivial_h1(const Tower& tower, const Word& w);

/// d_n(r) from d_0(r) = r and d_i(r) = (8r^2 + 4r) d_{i-1}(2(r + |a_i|))^2.
BigFloat distortion_bound(const Tower& tower, std::size_t r);
/// Same recursion truncated at the given level.
BigFloat distortion_bound(const Tower& tower, std::size_t level, const BigFloat& r);
/// D(n) via D(0) = 1, D(i) = 2 D(i-1) + 2.
std::uint64_t degree(const Tower& tower);
std::uint64_t degree(std::size_t height);

/// Twist exponents m_1..m_n prescribed for radius r, computed from the top level down.
std::vector<std::int64_t> paper_exponents(const Tower& tower, std::size_t r);

/// G_n -> F sending t_i to H_{i-1}(a_i)^{m_i}. Throws SizeLimitError when an
/// image would exceed `image_cap` letters.
Homomorphism tower_hom(const Tower& tower, const std::vector<std::int64_t>& m,
                       std::uint64_t image_cap = 50'000'000);

struct DiscriminateOptions {
  /// Search the smallest m_i per level (top-down) that passes the ball check.
  bool tight = false;
  std::uint64_t ball_cap = kDefaultBallCap;
  std::uint64_t image_cap = 50'000'000;
  /// Compare every pair of ball elements with the height-1 oracle when the
  /// ball has at most this many Y-words.
  std::size_t pair_check_limit = 1000;
};

struct Discrimination {
  Homomorphism hom;  // Y -> F
  Homomorphism tower_map;  // G_n -> F
  std::vector<std::int64_t> m;
  std::size_t radius = 0;
  std::size_t words = 0;
  std::size_t elements = 0;
  std::size_t stretch = 0;
  std::size_t pairs_checked = 0;
  BigFloat bound;
};

/// Builds h = tower_hom and verifies injectivity on B_Y(r) exhaustively.
/// Throws InjectivityError carrying the first colliding pair in shortlex order.
Discrimination discriminating_hom(const Tower& tower, const Subgroup& y, std::size_t r,
                                  const DiscriminateOptions& options = {});

struct Preset {
  Tower tower;
  Subgroup subgroup;
};
Preset preset_genus2();
Preset preset_z2();

}  // namespace residua
