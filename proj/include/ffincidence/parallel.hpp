#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace ffincidence {

/// Worker count used when a caller passes 0.
inline unsigned default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs body(begin, end) over contiguous chunks of [0, n) on up to `workers`
/// threads. Chunk boundaries depend only on (n, workers).
template <class Body>
void parallel_chunks(std::size_t n, unsigned workers, Body&& body) {
  if (workers == 0) workers = default_workers();
  const std::size_t chunks = std::min<std::size_t>(workers, n);
  if (chunks <= 1) {
    if (n > 0) body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(chunks);
  threads.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = n * c / chunks, end = n * (c + 1) / chunks;
    threads.emplace_back([&, c, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Integer sum of body(begin, end) over chunks; independent of scheduling.
template <class Body>
std::uint64_t parallel_sum(std::size_t n, unsigned workers, Body&& body) {
  if (workers == 0) workers = default_workers();
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
  std::vector<std::uint64_t> partial(chunks, 0);
  parallel_chunks(chunks, workers, [&](std::size_t cb, std::size_t ce) {
    for (std::size_t c = cb; c < ce; ++c) partial[c] = body(n * c / chunks, n * (c + 1) / chunks);
  });
  std::uint64_t total = 0;
  for (auto v : partial) total += v;
  return total;
}

}  // namespace ffincidence
