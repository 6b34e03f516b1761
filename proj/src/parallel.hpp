#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace polylap::detail {

/// Worker cap: POLYLAP_THREADS if set (min 1), else hardware concurrency.
inline int thread_count() {
  if (const char* env = std::getenv("POLYLAP_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

/// Runs f(i) for i in [0, n). Results must be written to per-i slots; the
/// partition never affects output values, so runs are deterministic.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  int workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &f] {
      for (std::size_t i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace polylap::detail
