#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace dsc {

/// Splits index ranges across a fixed number of worker threads. Every index
/// is handled by exactly one worker, so results do not depend on scheduling
/// as long as the body writes disjoint data.
class Executor {
 public:
  explicit Executor(int threads = 1) : threads_(std::max(1, threads)) {}

  int threads() const { return threads_; }

  template <class Body>
  void for_each(std::size_t n, Body&& body) const {
    if (threads_ == 1 || n < kMinParallel) {
      for (std::size_t i = 0; i < n; ++i) body(i);
      return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads_), n);
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      pool.emplace_back([lo, hi, &body] {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      });
    }
    for (std::size_t i = 0; i < std::min(n, chunk); ++i) body(i);
  }

 private:
  static constexpr std::size_t kMinParallel = 256;
  int threads_;
};

}  // namespace dsc
