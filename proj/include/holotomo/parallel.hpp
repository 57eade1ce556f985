#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace holotomo {

// Worker cap for slice- and scan-level loops. HOLOTOMO_THREADS overrides
// the hardware default; values below 1 are ignored.
inline int thread_cap() {
  static const int cap = [] {
    if (const char* env = std::getenv("HOLOTOMO_THREADS")) {
      const int v = std::atoi(env);
      if (v >= 1) return std::min(v, 256);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(std::min(hc, 16u)) : 1;
  }();
  return cap;
}

// Runs body(i) for i in [0, n). Iterations must be independent and must
// not throw; callers do their validation up front and reduce results in
// index order to stay bitwise reproducible.
template <class Body>
void parallel_for(int n, Body&& body) {
  const int workers = std::min(n, thread_cap());
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&body, w, n, workers] {
      for (int i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace holotomo
