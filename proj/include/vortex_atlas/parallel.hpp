/**
 * @file parallel.hpp
 * @brief Index-parallel loop with deterministic result slots.
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace vortex_atlas {

/// Thread count: explicit request if positive, else VORTEX_ATLAS_THREADS,
/// else hardware concurrency.
inline int resolve_threads(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("VORTEX_ATLAS_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, n). Callers write into slot i only, so output
/// is independent of scheduling. The exception from the lowest failing
/// index is rethrown.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, resolve_threads(threads));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace vortex_atlas
