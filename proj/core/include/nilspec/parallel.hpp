#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace nilspec::parallel {

inline unsigned thread_count() {
  if (const char* env = std::getenv("NILSPEC_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  unsigned n = std::thread::hardware_concurrency();
  return n > 0 ? n : 1;
}

// Evaluates fn(i) for i in [0, n) on a thread pool and returns the results
// in index order. Reductions over the returned vector are therefore
// deterministic regardless of scheduling.
template <typename T>
std::vector<T> map_indexed(std::size_t n, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  unsigned workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<std::size_t> next{0};
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        out[i] = fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace nilspec::parallel
