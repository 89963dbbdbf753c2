#pragma once

// Small numeric helpers shared by the engines.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace traptail {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline unsigned default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1u : n;
}

// Runs body(i) for i in [0, n) on up to `workers` threads. Indices are handed
// out dynamically; callers must write results into per-index slots. The first
// exception thrown by any task is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
  workers = std::max(1u, workers);
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned spawn = static_cast<unsigned>(std::min<std::size_t>(workers, n)) - 1;
  pool.reserve(spawn);
  for (unsigned w = 0; w < spawn; ++w) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace traptail
