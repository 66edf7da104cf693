#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace entrocap {

// Number of worker threads: explicit argument > ENTROCAP_JOBS > hardware.
inline int resolve_jobs(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ENTROCAP_JOBS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, n) across `jobs` threads. Work items are claimed by
// atomic counter; callers index results by i so output order is deterministic.
inline void parallel_for(long n, int jobs, const std::function<void(long)>& fn) {
  jobs = resolve_jobs(jobs);
  if (n <= 0) return;
  if (jobs <= 1 || n == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex err_mutex;
  int workers = static_cast<int>(std::min<long>(jobs, n));
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        long i = next.fetch_add(1);
        if (i >= n || failed.load()) break;
        try {
          fn(i);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lk(err_mutex);
          if (!failed.exchange(true)) first_error = e.what();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load()) throw std::runtime_error(first_error);
}

}  // namespace entrocap
