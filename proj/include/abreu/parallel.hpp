#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace abreu::parallel {

inline std::atomic<int>& thread_count_storage() {
  static std::atomic<int> n{1};
  return n;
}

/// Worker count used by node-parallel evaluation. Defaults to 1.
inline int thread_count() { return thread_count_storage().load(); }
inline void set_thread_count(int n) { thread_count_storage().store(std::max(1, n)); }

/// Fills out[i] = fn(i) for i in [0, n). Each slot is written by exactly one worker,
/// so the output does not depend on the thread count.
template <typename T, typename Fn>
std::vector<T> map_indexed(std::size_t n, Fn&& fn) {
  std::vector<T> out(n);
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([&, w, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  // Lowest failing chunk first: same error as the sequential path.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace abreu::parallel
