#pragma once

// Minimal deterministic fork-join: work items are claimed from an atomic
// counter, results land in per-index slots, so output never depends on timing.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qpoly {

inline std::atomic<unsigned>& thread_setting() {
  static std::atomic<unsigned> n{0};  // 0 = hardware concurrency
  return n;
}

inline void set_thread_count(unsigned n) { thread_setting() = n; }

inline unsigned thread_count() {
  unsigned n = thread_setting();
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::size_t error_index = n;
  std::mutex mu;
  auto work = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        // keep the lowest failing index so the rethrown error is deterministic
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace qpoly
