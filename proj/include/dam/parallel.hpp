#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace dam {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

// Runs fn(i) for i in [0, count). Work items must be independent; callers get
// determinism by writing to per-index slots and reducing in index order.
inline void parallel_for(std::int64_t count, int threads,
                         const std::function<void(std::int64_t)>& fn) {
  const int workers = std::min<std::int64_t>(resolve_threads(threads), count);
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace dam
