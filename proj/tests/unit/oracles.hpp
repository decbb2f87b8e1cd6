#pragma once

// Slow, obviously-correct reference implementations used by the unit tests.

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "residua/rng.hpp"
#include "residua/words.hpp"

namespace oracle {

using Letters = std::vector<residua::Letter>;

// Repeatedly scans for an adjacent inverse pair and deletes it.
inline Letters naive_reduce(Letters w) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i] == -w[i + 1]) {
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(i), w.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        changed = true;
        break;
      }
    }
  }
  return w;
}

inline Letters random_letters(residua::CounterRng& rng, std::size_t rank, std::size_t len) {
  Letters w;
  for (std::size_t i = 0; i < len; ++i) {
    const auto g = static_cast<std::size_t>(rng.below(rank));
    w.push_back(residua::letter_for(g, rng.below(2) ? +1 : -1));
  }
  return w;
}

// Closed walks of length 2n from the root of the (2k)-regular tree, by
// dynamic programming over the distance from the root.
inline std::vector<double> tree_closed_walks(std::size_t k, std::size_t max_len) {
  std::vector<double> out(max_len + 1, 0.0);
  std::vector<double> f(max_len + 2, 0.0);
  f[0] = 1.0;
  out[0] = 1.0;
  const double deg = 2.0 * static_cast<double>(k);
  for (std::size_t step = 1; step <= max_len; ++step) {
    std::vector<double> g(max_len + 2, 0.0);
    for (std::size_t d = 0; d <= step; ++d) {
      if (f[d] == 0.0) continue;
      if (d == 0) {
        g[1] += deg * f[0];
      } else {
        g[d - 1] += f[d];
        if (d + 1 < g.size()) g[d + 1] += (deg - 1.0) * f[d];
      }
    }
    f = std::move(g);
    out[step] = f[0];
  }
  return out;
}

}  // namespace oracle
