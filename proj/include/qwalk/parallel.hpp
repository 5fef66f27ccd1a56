#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qwalk {

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
// executed exactly once; the first exception thrown is rethrown here.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

// Pairwise (cascade) sum in index order; result depends only on the values.
template <class T, class Get>
T pairwise_sum(std::size_t begin, std::size_t end, Get&& get) {
  if (end - begin <= 8) {
    T acc{};
    for (std::size_t i = begin; i < end; ++i) acc += get(i);
    return acc;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum<T>(begin, mid, get) + pairwise_sum<T>(mid, end, get);
}

}  // namespace qwalk
