#pragma once

#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace qchan {

/// Worker cap: QCHAN_THREADS if set, otherwise hardware concurrency.
inline unsigned worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("QCHAN_THREADS")) {
    long k = std::strtol(env, nullptr, 10);
    if (k >= 1) return static_cast<unsigned>(k) < hw ? static_cast<unsigned>(k) : hw;
  }
  return hw;
}

/// Runs f(i) for i in [0, n). Tasks must be independent; results are expected
/// to be written into index-addressed slots so the outcome does not depend on
/// scheduling.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  unsigned workers = worker_count();
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  if (workers > n) workers = static_cast<unsigned>(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qchan
