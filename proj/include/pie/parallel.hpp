#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace pie {

// Worker count: PIE_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
inline int thread_budget() {
  if (const char* env = std::getenv("PIE_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, total).  Work is dealt in strides so slot i always
// receives the same logical task regardless of the thread count; callers get
// determinism by writing results into slot i only.
inline void parallel_for(int total, const std::function<void(int)>& fn) {
  int workers = thread_budget();
  if (workers <= 1 || total <= 1) {
    for (int i = 0; i < total; ++i) fn(i);
    return;
  }
  if (workers > total) workers = total;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < total; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace pie
