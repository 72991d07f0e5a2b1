// Copyright 2026 The cavsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cavsim {

inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) {
    return requested;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(chunk_index, begin, end) over fixed-size chunks of [0, n).
/// The chunk layout depends only on n and chunk_size, never on the worker
/// count; callers reduce per-chunk results in chunk order.
template <class Fn>
void parallel_chunks(std::size_t n, std::size_t chunk_size, unsigned workers, Fn&& fn) {
  const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t chunk = next.fetch_add(1);
      if (chunk >= n_chunks) {
        return;
      }
      try {
        const std::size_t begin = chunk * chunk_size;
        fn(chunk, begin, std::min(n, begin + chunk_size));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
        next.store(n_chunks);
      }
    }
  };

  const unsigned count =
      static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), n_chunks));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(count);
    for (unsigned i = 0; i < count; ++i) {
      pool.emplace_back(worker);
    }
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

}  // namespace cavsim
