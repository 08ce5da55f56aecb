#ifndef TSE_PARALLEL_HPP
#define TSE_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace tse {

/// Environment variable capping worker threads for sweeps and replications.
inline constexpr const char* kMaxThreadsEnv = "TSE_MAX_THREADS";

/// Number of workers for `jobs` independent tasks. `requested` = 0 means
/// hardware concurrency; TSE_MAX_THREADS, when set to a positive integer,
/// caps the result.
inline std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested != 0
                      ? requested
                      : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv(kMaxThreadsEnv)) {
    try {
      const long long c = std::stoll(cap);
      if (c > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(c));
    } catch (const std::exception&) {
      // Unparseable cap is ignored.
    }
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

/// Calls fn(i) for every i in [0, count). Each index is visited exactly
/// once; fn must only write state owned by index i. The first exception
/// thrown by any task is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t requested_threads, Fn&& fn) {
  const std::size_t workers = worker_count(requested_threads, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto body = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace tse

#endif  // TSE_PARALLEL_HPP
