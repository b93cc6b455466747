#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace subray {

/// Worker count: SUBRAYLEIGH_THREADS caps it, hardware concurrency otherwise.
inline unsigned worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("SUBRAYLEIGH_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
  }
  return hw;
}

/// Runs fn(block_index, begin, end) over [0, total) split into fixed-size
/// blocks. Blocks are claimed dynamically but identified by index, so callers
/// that accumulate into per-block slots get results independent of
/// scheduling and thread count.
inline void parallel_blocks(
    std::uint64_t total, std::uint64_t block_size,
    const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& fn) {
  if (total == 0) return;
  const std::uint64_t n_blocks = (total + block_size - 1) / block_size;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(worker_count(), n_blocks));
  if (workers <= 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b) {
      fn(b, b * block_size, std::min(total, (b + 1) * block_size));
    }
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::uint64_t b = next.fetch_add(1);
        if (b >= n_blocks) return;
        fn(b, b * block_size, std::min(total, (b + 1) * block_size));
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace subray
