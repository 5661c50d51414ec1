#pragma once

// Bounded fork-join over an index range. Each index writes only its own slot, so
// results do not depend on the number of threads.

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "circlept/types.hpp"

namespace circlept {

/// Thread budget: 0 means hardware concurrency.
inline int resolve_threads(int budget) {
  if (budget > 0) return budget;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count). The exception of the lowest failing index is rethrown.
inline void parallel_for(Index count, int budget, const std::function<void(Index)>& body) {
  const int threads = static_cast<int>(std::min<Index>(resolve_threads(budget), count));
  if (threads <= 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<Index> next{0};
  auto worker = [&] {
    for (Index i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace circlept
