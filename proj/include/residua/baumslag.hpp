#pragma once

// The quantitative power lemma: if w = prod_{i=0..n} u^{k_i} b_i is trivial and
// the exponents are large compared with the b_i, then some b_i commutes with u.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "residua/rng.hpp"
#include "residua/words.hpp"

namespace residua {

struct PowerInstance {
  Word u;
  std::vector<Word> b;
  std::vector<std::int64_t> k;

  std::size_t n() const { return b.empty() ? 0 : b.size() - 1; }
};

/// A: u cyclically reduced and primitive, min_{i>0} |k_i||u| > (8n+2) max(|u|, max|b_i|).
/// B: any u, min_{i>=0} |k_i| >= (8n+2) max_i (|b_i| + |u|).
enum class Variant { A, B };

/// Largest value of the relevant min |k_i| for which the hypothesis fails, so the
/// hypothesis reads min |k_i| > threshold. For variant A with n = 0 this is -1.
std::int64_t threshold(const PowerInstance& inst, Variant variant);
bool check_hypothesis(const PowerInstance& inst, Variant variant);
/// The minimum |k_i| the variant constrains (i > 0 for A, i >= 0 for B).
std::int64_t min_k(const PowerInstance& inst, Variant variant);

/// Length of the unreduced product: sum |k_i||u| + sum |b_i|.
std::uint64_t unreduced_length(const PowerInstance& inst);
Word evaluate_w(const PowerInstance& inst, std::uint64_t length_cap = 100'000'000);

struct LemmaVerdict {
  bool hypothesis_holds = false;
  bool w_trivial = false;
  std::optional<std::size_t> commuting_index;
};

/// Throws CounterexampleError if the hypothesis holds, w = e and no b_i commutes with u.
LemmaVerdict verify_instance(const PowerInstance& inst, Variant variant);

struct SearchBounds {
  std::size_t rank = 2;
  std::size_t n_max = 3;
  std::size_t u_len = 4;
  std::size_t b_len = 6;
  std::int64_t k_max = 400;
};

struct TrialRow {
  std::uint64_t trial = 0;
  std::size_t n = 0;
  std::size_t u_len = 0;
  std::int64_t threshold = 0;
  std::int64_t min_k = 0;
  bool w_trivial = false;
  std::optional<std::size_t> commuting_index;
};

struct SearchReport {
  std::vector<TrialRow> rows;
  std::vector<std::string> violations;
  /// Probe instances with w = e forced by the last syllable.
  std::uint64_t probes = 0;
  /// Probes where no b_i commutes with u.
  std::uint64_t probes_noncommuting = 0;
  /// Largest min_k / (threshold + 1) over noncommuting probes; below 1 whenever the lemma holds.
  double tightest_ratio = 0.0;
};

/// Random variant-B instances with exponents drawn above the threshold, plus
/// one tightness probe per trial. Deterministic in (seed, bounds, trials).
SearchReport search_counterexamples(std::uint64_t seed, const SearchBounds& bounds, std::uint64_t trials);

struct SweepReport {
  std::uint64_t instances = 0;
  std::uint64_t hypothesis_a = 0;
  std::uint64_t hypothesis_b = 0;
  std::uint64_t trivial = 0;
  std::vector<std::string> violations;
};

/// Every n = 0 instance with |u| <= u_len, |b| <= b_len, |k| <= k_max over the given rank.
SweepReport exhaustive_n0(std::size_t rank, std::size_t u_len, std::size_t b_len, std::int64_t k_max);

/// Uniform reduced word of the given length.
Word random_reduced_word(CounterRng& rng, std::size_t rank, std::size_t length);
/// Length uniform in [1, max_len], then uniform among cyclically reduced
/// primitive words of that length (rejection sampling).
Word random_primitive_word(CounterRng& rng, std::size_t rank, std::size_t max_len);

std::string format_instance(const Basis& basis, const PowerInstance& inst);
std::string search_csv(const SearchReport& report);

}  // namespace residua
