#pragma once

// Deterministic data parallelism: work is cut into fixed-size chunks that do
// not depend on the thread count, and per-chunk results are combined in chunk
// order.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rvlab {

namespace detail {
inline std::atomic<unsigned>& thread_setting() {
  static std::atomic<unsigned> n{1};
  return n;
}
}  // namespace detail

/// Worker count used by every parallel loop; 0 means hardware concurrency.
inline void set_threads(unsigned n) { detail::thread_setting() = n; }

inline unsigned threads() {
  const unsigned n = detail::thread_setting();
  return n == 0 ? std::max(1u, std::thread::hardware_concurrency()) : n;
}

inline constexpr std::size_t kChunk = std::size_t{1} << 14;

/// Calls f(begin, end, chunk_index) on consecutive chunks of [0, n).
template <class F>
void parallel_chunks(std::size_t n, F&& f, std::size_t chunk = kChunk) {
  if (n == 0) return;
  const std::size_t chunks = (n + chunk - 1) / chunk;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads(), chunks));
  auto run = [&](std::size_t c) { f(c * chunk, std::min(n, (c + 1) * chunk), c); };
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    try {
      for (std::size_t c; (c = next.fetch_add(1)) < chunks;) run(c);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next = chunks;
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

template <class F>
void parallel_for(std::size_t n, F&& f, std::size_t chunk = kChunk) {
  parallel_chunks(
      n,
      [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t i = b; i < e; ++i) f(i);
      },
      chunk);
}

/// Ordered reduction: map(begin, end) -> T per chunk, then combine left to
/// right. Identical results for any thread count.
template <class T, class Map, class Combine>
T parallel_reduce(std::size_t n, T init, Map&& map, Combine&& combine, std::size_t chunk = kChunk) {
  const std::size_t chunks = n == 0 ? 0 : (n + chunk - 1) / chunk;
  std::vector<T> partial(chunks, init);
  parallel_chunks(
      n, [&](std::size_t b, std::size_t e, std::size_t c) { partial[c] = map(b, e); }, chunk);
  T acc = std::move(init);
  for (auto& p : partial) acc = combine(std::move(acc), std::move(p));
  return acc;
}

}  // namespace rvlab
