#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace hbndiff {

/// Run fn(begin, end) over [0, n) split into contiguous chunks, one per worker.
/// Chunk boundaries depend only on n and the worker count, and every output
/// element is written by exactly one chunk, so results do not depend on
/// scheduling. threads <= 1 runs inline.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t workers = threads > 1 ? std::min<std::size_t>(threads, n) : 1;
  if (workers == 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace hbndiff
