#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bcrecon {

/// BCRECON_THREADS, or hardware concurrency when unset or 0.
std::size_t default_thread_count();

/// Resolves a requested count (0 = default) to at least one thread.
std::size_t resolve_threads(std::size_t requested);

/// Calls body(first, last) on contiguous chunks of [0, n). Chunk boundaries
/// depend only on n and the chunk size, never on the thread count, so any
/// per-chunk output is the same however the work is scheduled.
template <class Body>
void parallel_chunks(std::size_t n, std::size_t chunk, std::size_t threads, Body&& body) {
  if (n == 0) return;
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t chunks = (n + chunk - 1) / chunk;
  threads = std::min(resolve_threads(threads), chunks);
  if (threads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c * chunk, std::min(n, (c + 1) * chunk));
    return;
  }
  std::vector<std::jthread> pool;
  std::exception_ptr failure;
  std::mutex failure_lock;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < chunks; c += threads) {
        try {
          body(c * chunk, std::min(n, (c + 1) * chunk));
        } catch (...) {
          std::lock_guard lock(failure_lock);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace bcrecon
