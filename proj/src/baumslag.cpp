#include "residua/baumslag.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include <fmt/format.h>

#include "residua/csv.hpp"
#include "residua/error.hpp"
#include "residua/parallel.hpp"

namespace residua {

namespace {

std::int64_t abs64(std::int64_t x) { return x < 0 ? -x : x; }

void check_shape(const PowerInstance& inst) {
  if (inst.u.empty()) throw InvalidArgument("u must be nontrivial");
  if (inst.b.empty() || inst.b.size() != inst.k.size()) {
    throw InvalidArgument("b and k must be nonempty and of equal length");
  }
}

bool primitive_cyclic(const Word& u) {
  if (!is_cyclically_reduced(u)) return false;
  return cyclic_decompose(u).exponent == 1;
}

}  // namespace

std::int64_t threshold(const PowerInstance& inst, Variant variant) {
  check_shape(inst);
  const auto n = static_cast<std::int64_t>(inst.n());
  const auto u = static_cast<std::int64_t>(inst.u.length());
  std::int64_t max_b = 0;
  for (const auto& b : inst.b) max_b = std::max(max_b, static_cast<std::int64_t>(b.length()));
  if (variant == Variant::A) {
    if (n == 0) return -1;
    return (8 * n + 2) * std::max(u, max_b) / u;
  }
  return (8 * n + 2) * (max_b + u) - 1;
}

std::int64_t min_k(const PowerInstance& inst, Variant variant) {
  check_shape(inst);
  std::int64_t out = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = variant == Variant::A ? 1 : 0; i < inst.k.size(); ++i) out = std::min(out, abs64(inst.k[i]));
  return out;
}

bool check_hypothesis(const PowerInstance& inst, Variant variant) {
  check_shape(inst);
  if (variant == Variant::A && !primitive_cyclic(inst.u)) {
    throw InvalidArgument("variant A needs u cyclically reduced and primitive");
  }
  if (variant == Variant::A && inst.n() == 0) return true;
  return min_k(inst, variant) > threshold(inst, variant);
}

std::uint64_t unreduced_length(const PowerInstance& inst) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < inst.b.size(); ++i) {
    total += static_cast<std::uint64_t>(abs64(inst.k[i])) * inst.u.length() + inst.b[i].length();
  }
  return total;
}

Word evaluate_w(const PowerInstance& inst, std::uint64_t length_cap) {
  check_shape(inst);
  const std::uint64_t predicted = unreduced_length(inst);
  if (predicted > length_cap) {
    throw SizeLimitError(fmt::format("w would have {} letters before reduction (cap {})", predicted, length_cap),
                         predicted, length_cap);
  }
  std::vector<Letter> buffer;
  for (std::size_t i = 0; i < inst.b.size(); ++i) {
    append_reduced(buffer, power(inst.u, inst.k[i]).letters());
    append_reduced(buffer, inst.b[i].letters());
  }
  return Word::from_reduced(std::move(buffer));
}

namespace {

std::optional<std::size_t> first_commuting(const PowerInstance& inst) {
  for (std::size_t i = 0; i < inst.b.size(); ++i) {
    if (commute(inst.u, inst.b[i])) return i;
  }
  return std::nullopt;
}

}  // namespace

std::string format_instance(const Basis& basis, const PowerInstance& inst) {
  std::string b;
  std::string k;
  for (std::size_t i = 0; i < inst.b.size(); ++i) {
    if (i) {
      b += ", ";
      k += ", ";
    }
    b += fmt::format("\"{}\"", format_word(basis, inst.b[i]));
    k += fmt::format("{}", inst.k[i]);
  }
  return fmt::format("u = \"{}\", b = [{}], k = [{}]", format_word(basis, inst.u), b, k);
}

namespace {

Basis default_basis(std::size_t rank) {
  static constexpr const char* kNames = "abcdefghijklmnopqrstuvwxyz";
  std::vector<std::string> names;
  for (std::size_t i = 0; i < rank; ++i) {
    names.push_back(i < 26 ? std::string(1, kNames[i]) : fmt::format("x{}", i));
  }
  return Basis(std::move(names));
}

}  // namespace

LemmaVerdict verify_instance(const PowerInstance& inst, Variant variant) {
  LemmaVerdict v;
  v.hypothesis_holds = check_hypothesis(inst, variant);
  v.w_trivial = evaluate_w(inst).empty();
  v.commuting_index = first_commuting(inst);
  if (v.hypothesis_holds && v.w_trivial && !v.commuting_index) {
    std::size_t rank = inst.u.min_rank();
    for (const auto& b : inst.b) rank = std::max(rank, b.min_rank());
    throw CounterexampleError("power lemma violated: " + format_instance(default_basis(std::max<std::size_t>(rank, 1)), inst));
  }
  return v;
}

Word random_reduced_word(CounterRng& rng, std::size_t rank, std::size_t length) {
  if (rank == 0) throw InvalidArgument("rank must be positive");
  std::vector<Letter> letters;
  letters.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    const std::uint64_t choices = i == 0 ? 2 * rank : 2 * rank - 1;
    auto pick = static_cast<std::size_t>(rng.below(choices));
    // Slots are 2g (x_g) and 2g+1 (x_g^-1); skip the slot of the letter that
    // would cancel the previous one.
    if (i > 0) {
      const Letter forbidden = -letters.back();
      const std::size_t slot = generator_of(forbidden) * 2 + (forbidden < 0 ? 1 : 0);
      if (pick >= slot) ++pick;
    }
    letters.push_back(letter_for(pick / 2, pick % 2 ? -1 : 1));
  }
  return Word::from_reduced(std::move(letters));
}

Word random_primitive_word(CounterRng& rng, std::size_t rank, std::size_t max_len) {
  if (max_len == 0) throw InvalidArgument("u length bound must be positive");
  const auto len = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(max_len)));
  if (rank == 1 && len > 1) return Word::generator(0, rng.below(2) ? -1 : 1);
  for (;;) {
    Word w = random_reduced_word(rng, rank, len);
    if (primitive_cyclic(w)) return w;
  }
}

namespace {

struct TrialResult {
  TrialRow row;
  std::string violation;
  bool probe = false;
  bool probe_noncommuting = false;
  double probe_ratio = 0.0;
};

std::int64_t signed_draw(CounterRng& rng, std::int64_t lo, std::int64_t hi) {
  const std::int64_t v = rng.between(lo, hi);
  return rng.below(2) ? -v : v;
}

}  // namespace

SearchReport search_counterexamples(std::uint64_t seed, const SearchBounds& bounds, std::uint64_t trials) {
  if (bounds.rank == 0 || bounds.u_len == 0 || bounds.k_max < 1) throw InvalidArgument("invalid search bounds");
  const CounterRng root(seed);
  const CounterRng probe_root(seed, 1);
  std::vector<TrialResult> results(trials);

  parallel_for(trials, [&](std::size_t t) {
    TrialResult& out = results[t];
    CounterRng rng = root.split(t);
    PowerInstance inst;
    const auto n = static_cast<std::size_t>(rng.below(bounds.n_max + 1));
    inst.u = random_primitive_word(rng, bounds.rank, bounds.u_len);
    for (std::size_t i = 0; i <= n; ++i) {
      const auto len = static_cast<std::size_t>(rng.below(bounds.b_len + 1));
      inst.b.push_back(random_reduced_word(rng, bounds.rank, len));
    }
    inst.k.assign(n + 1, 0);
    const std::int64_t thr = threshold(inst, Variant::B);
    for (auto& k : inst.k) k = signed_draw(rng, thr + 1, std::max(bounds.k_max, thr + 1));
    out.row.trial = t;
    out.row.n = n;
    out.row.u_len = inst.u.length();
    out.row.threshold = thr;
    out.row.min_k = min_k(inst, Variant::B);
    try {
      const LemmaVerdict v = verify_instance(inst, Variant::B);
      out.row.w_trivial = v.w_trivial;
      out.row.commuting_index = v.commuting_index;
    } catch (const CounterexampleError& e) {
      out.row.w_trivial = true;
      out.violation = fmt::format("trial {}: {}", t, e.what());
    }

    // Probe: force w = e through the last syllable and see how close the
    // exponents get to the threshold without a commuting b_i.
    if (bounds.n_max == 0) return;
    CounterRng prng = probe_root.split(t);
    PowerInstance probe;
    const auto pn = static_cast<std::size_t>(prng.between(1, static_cast<std::int64_t>(bounds.n_max)));
    probe.u = random_primitive_word(prng, bounds.rank, bounds.u_len);
    std::vector<Letter> prefix;
    for (std::size_t i = 0; i <= pn; ++i) {
      probe.k.push_back(signed_draw(prng, 1, bounds.k_max));
      append_reduced(prefix, power(probe.u, probe.k.back()).letters());
      if (i < pn) {
        const auto len = static_cast<std::size_t>(prng.below(bounds.b_len + 1));
        probe.b.push_back(random_reduced_word(prng, bounds.rank, len));
        append_reduced(prefix, probe.b.back().letters());
      }
    }
    probe.b.push_back(inverse(Word::from_reduced(std::move(prefix))));
    out.probe = true;
    try {
      const LemmaVerdict v = verify_instance(probe, Variant::B);
      if (!v.w_trivial) throw InvariantViolation("tightness probe failed to produce w = e");
      if (!v.commuting_index) {
        out.probe_noncommuting = true;
        out.probe_ratio = static_cast<double>(min_k(probe, Variant::B)) /
                          static_cast<double>(threshold(probe, Variant::B) + 1);
      }
    } catch (const CounterexampleError& e) {
      out.violation = fmt::format("probe {}: {}", t, e.what());
    }
  });

  SearchReport report;
  report.rows.reserve(trials);
  for (auto& r : results) {
    report.rows.push_back(r.row);
    if (!r.violation.empty()) report.violations.push_back(std::move(r.violation));
    report.probes += r.probe ? 1 : 0;
    if (r.probe_noncommuting) {
      ++report.probes_noncommuting;
      report.tightest_ratio = std::max(report.tightest_ratio, r.probe_ratio);
    }
  }
  return report;
}

SweepReport exhaustive_n0(std::size_t rank, std::size_t u_len, std::size_t b_len, std::int64_t k_max) {
  const Basis basis = default_basis(rank);
  std::vector<Word> us = ball(rank, u_len);
  us.erase(us.begin());  // the identity
  const std::vector<Word> bs = ball(rank, b_len);
  std::vector<SweepReport> parts(us.size());

  parallel_for(us.size(), [&](std::size_t i) {
    SweepReport& part = parts[i];
    const Word& u = us[i];
    const bool a_applies = primitive_cyclic(u);
    PowerInstance inst{u, {Word()}, {0}};
    for (const Word& b : bs) {
      inst.b[0] = b;
      const bool commutes = commute(u, b);
      for (std::int64_t k = -k_max; k <= k_max; ++k) {
        inst.k[0] = k;
        ++part.instances;
        const bool hyp_a = a_applies && check_hypothesis(inst, Variant::A);
        const bool hyp_b = check_hypothesis(inst, Variant::B);
        part.hypothesis_a += hyp_a ? 1 : 0;
        part.hypothesis_b += hyp_b ? 1 : 0;
        const bool trivial = evaluate_w(inst).empty();
        part.trivial += trivial ? 1 : 0;
        if ((hyp_a || hyp_b) && trivial && !commutes) part.violations.push_back(format_instance(basis, inst));
      }
    }
  });

  SweepReport out;
  for (auto& p : parts) {
    out.instances += p.instances;
    out.hypothesis_a += p.hypothesis_a;
    out.hypothesis_b += p.hypothesis_b;
    out.trivial += p.trivial;
    for (auto& v : p.violations) out.violations.push_back(std::move(v));
  }
  return out;
}

std::string search_csv(const SearchReport& report) {
  std::string out = csv_preamble("trial,n,|u|,threshold,min_k,w_trivial,commuting_index");
  for (const auto& r : report.rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", r.trial, r.n, r.u_len, r.threshold, r.min_k, r.w_trivial ? 1 : 0,
                       r.commuting_index ? fmt::format("{}", *r.commuting_index) : std::string());
  }
  return out;
}

}  // namespace residua
