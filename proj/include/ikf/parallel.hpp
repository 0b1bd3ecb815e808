#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace ikf {

/// Runs body(i) for i in [0, count) on the OpenMP team, or inline when already
/// inside an active parallel region. The first exception
/// thrown by any iteration is rethrown on the calling thread after the loop.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) if (!omp_in_parallel())
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Caps the OpenMP team size; 0 leaves the runtime default.
inline void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace ikf
