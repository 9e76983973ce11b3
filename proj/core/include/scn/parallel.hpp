#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace scn {

/// Number of worker threads used by the parallel kernels. Defaults to the
/// hardware concurrency; set_worker_count(1) forces serial execution.
std::size_t worker_count();
void set_worker_count(std::size_t n);

/// Runs body(i) for i in [begin, end) across worker threads. Indices are
/// handed out dynamically, so body must write only to slots owned by i; the
/// result is then independent of the schedule. The first exception thrown by
/// any worker is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t begin, std::size_t end, Body&& body) {
  if (end <= begin) return;
  const std::size_t total = end - begin;
  const std::size_t workers = std::min(worker_count(), total);
  if (workers <= 1) {
    for (std::size_t i = begin; i < end; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{begin};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::exception_ptr failure;
  auto run = [&] {
    for (std::size_t i = next++; i < end && !failed; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace scn
