#include "residua/parallel.hpp"

#include <atomic>

namespace residua {

namespace {
std::atomic<std::size_t> g_max_threads{0};
}

void set_max_threads(std::size_t threads) { g_max_threads.store(threads); }

std::size_t max_threads() {
  const std::size_t configured = g_max_threads.load();
  if (configured != 0) return configured;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace residua
