#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace leiden {

/// Number of worker threads used by the data-parallel stages.
inline std::size_t worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Splits [0, n) into contiguous chunks and calls body(chunk_index, begin, end)
/// on each, one chunk per worker. Chunk boundaries depend only on n and the
/// worker count, so callers that write to per-index slots stay deterministic.
/// The first exception thrown by any chunk is rethrown on the calling thread.
template <class Body>
void parallel_chunks(std::size_t n, Body&& body, std::size_t workers = worker_count()) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers <= 1) {
    if (n > 0) body(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t step = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * step;
    const std::size_t end = std::min(n, begin + step);
    threads.emplace_back([&, w, begin, end] {
      try {
        if (begin < end) body(w, begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// parallel_chunks with a per-index body.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  parallel_chunks(n, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) body(i);
  });
}

}  // namespace leiden
