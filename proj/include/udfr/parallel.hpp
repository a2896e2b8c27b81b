// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace udfr {

inline int hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Runs fn(worker_id, begin, end) on contiguous index chunks. worker_id is in
// [0, n_workers); chunks never overlap, so workers may own per-id scratch.
template <typename Fn>
void parallel_chunks(std::size_t count, int n_workers, Fn&& fn) {
  if (n_workers <= 1 || count <= 1) {
    fn(0, std::size_t{0}, count);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(n_workers, count);
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, w, begin, end] { fn(static_cast<int>(w), begin, end); });
  }
  for (auto& t : pool) t.join();
}

// Simple parallel loop: fn(index).
template <typename Fn>
void parallel_for(std::size_t count, int n_workers, Fn&& fn) {
  parallel_chunks(count, n_workers, [&fn](int, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) fn(i);
  });
}

}  // namespace udfr
