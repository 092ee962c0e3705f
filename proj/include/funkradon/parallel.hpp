#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

#include "funkradon/format.hpp"

namespace funkradon {

/// Worker count from FUNKRADON_WORKERS, else the hardware concurrency.
inline int default_workers() {
  if (const char* env = std::getenv("FUNKRADON_WORKERS")) {
    auto v = parse_int(env);
    if (v && *v >= 1) return static_cast<int>(std::min<long long>(*v, 256));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n) on `workers` threads with static contiguous
/// chunks. Each index is handled by exactly one call, so results written to
/// per-index slots do not depend on the worker count. The exception from the
/// lowest failing chunk is rethrown.
template <class Body>
void parallel_for(int n, int workers, Body&& body) {
  if (n <= 0) return;
  workers = std::clamp(workers, 1, n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int lo = static_cast<int>(static_cast<long long>(n) * w / workers);
    const int hi = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
    pool.emplace_back([&, lo, hi, w] {
      try {
        for (int i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace funkradon
