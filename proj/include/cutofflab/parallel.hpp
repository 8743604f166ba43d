#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace cutofflab {

/// Worker count: CUTOFFLAB_WORKERS env override, else hardware concurrency.
inline int default_workers() {
  if (const char* env = std::getenv("CUTOFFLAB_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, n) on a bounded pool. Results must be written to
/// per-index slots; scheduling order never affects outputs.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         int n_workers = 0) {
  if (n == 0) return;
  int workers = n_workers > 0 ? n_workers : default_workers();
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

/// Pairwise (tree) summation over a slot vector; associative and
/// order-independent so reductions do not drift with the worker count.
inline double pairwise_sum(const std::vector<double>& xs, std::size_t lo, std::size_t hi) {
  if (hi - lo == 0) return 0.0;
  if (hi - lo == 1) return xs[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(xs, lo, mid) + pairwise_sum(xs, mid, hi);
}

inline double pairwise_sum(const std::vector<double>& xs) {
  return pairwise_sum(xs, 0, xs.size());
}

}  // namespace cutofflab
