#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace pvi {

inline int hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Runs fn(lo, hi) over [0, n) split into chunks of at most chunk_size.
// Chunks are claimed by workers through an atomic counter; fn must write
// only to locations owned by its chunk, so results do not depend on the
// schedule. The first exception thrown by any worker is rethrown.
inline void parallel_for_chunks(std::uint64_t n, std::uint64_t chunk_size, int threads,
                                const std::function<void(std::uint64_t, std::uint64_t)>& fn) {
  if (n == 0) return;
  if (chunk_size == 0) chunk_size = 1;
  const std::uint64_t n_chunks = (n + chunk_size - 1) / chunk_size;
  const int workers = static_cast<int>(
      std::min<std::uint64_t>(n_chunks, threads < 1 ? 1 : static_cast<std::uint64_t>(threads)));

  if (workers <= 1) {
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
      const std::uint64_t lo = c * chunk_size;
      fn(lo, std::min(n, lo + chunk_size));
    }
    return;
  }

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= n_chunks) return;
      const std::uint64_t lo = c * chunk_size;
      try {
        fn(lo, std::min(n, lo + chunk_size));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace pvi
