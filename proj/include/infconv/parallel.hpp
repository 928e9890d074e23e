// Copyright 2026 The infconv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace infconv {

// Deterministic parallelism: work is cut into fixed-size chunks whose count
// does not depend on the thread count, each chunk owns an accumulator, and
// the caller merges accumulators in chunk order. Any pool size therefore
// produces bit-identical results.
template <typename T, typename Fn>
std::vector<T> parallel_chunks(std::size_t n, int threads, Fn&& fn,
                               std::size_t chunk = 1 << 15) {
  if (n == 0) return {};
  std::size_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<T> accs(n_chunks);
  auto work = [&](std::size_t c) {
    std::size_t lo = c * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    fn(lo, hi, accs[c]);
  };
  if (threads <= 1 || n_chunks == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) work(c);
    return accs;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::size_t n_threads = std::min<std::size_t>(threads, n_chunks);
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1))
        work(c);
    });
  }
  for (auto& th : pool) th.join();
  return accs;
}

// Row-wise variant for pair scans: fn(row, acc) is called for every row in
// the chunk, sharing that chunk's accumulator.
template <typename T, typename Fn>
std::vector<T> parallel_rows(std::size_t n, int threads, Fn&& fn,
                             std::size_t chunk = 16) {
  return parallel_chunks<T>(
      n, threads,
      [&](std::size_t lo, std::size_t hi, T& acc) {
        for (std::size_t i = lo; i < hi; ++i) fn(i, acc);
      },
      chunk);
}

}  // namespace infconv
