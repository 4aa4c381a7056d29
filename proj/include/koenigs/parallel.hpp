#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace koenigs {

// Runs body(k) for k in [0, n). Each k must write only to its own slot, so the
// result does not depend on the thread count. The first exception (lowest k)
// is rethrown after all workers join.
template <class Body>
void parallel_for(int n, int threads, Body&& body) {
  if (threads <= 1 || n <= 1) {
    for (int k = 0; k < n; ++k) body(k);
    return;
  }
  const int workers = std::min(threads, n);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int k = w; k < n; k += workers) {
        try {
          body(k);
        } catch (...) {
          errors[static_cast<std::size_t>(k)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace koenigs
