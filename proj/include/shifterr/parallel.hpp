#pragma once

#include <cstddef>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace shifterr {

/// Serial reference loop.  The parallel kernel below must produce results
/// bit-identical to this one; tests and the replicate benchmark compare the
/// two directly.
template <class Fn>
void serial_for_each(std::size_t count, Fn&& fn) {
  for (std::size_t i = 0; i < count; ++i) fn(i);
}

/// Runs fn(0..count-1), each call writing only to its own output slot.
/// jobs <= 1 selects the serial reference path.  The first exception thrown
/// by any worker is rethrown on the calling thread after the loop drains.
template <class Fn>
void parallel_for_each(std::size_t count, int jobs, Fn&& fn) {
#ifdef _OPENMP
  if (jobs > 1) {
    std::exception_ptr first_error = nullptr;
    const long long nc = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (long long i = 0; i < nc; ++i) {
      if (first_error) continue;
      try {
        fn(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(shifterr_parallel_error)
        if (!first_error) first_error = std::current_exception();
      }
    }
    if (first_error) std::rethrow_exception(first_error);
    return;
  }
#else
  (void)jobs;
#endif
  serial_for_each(count, fn);
}

/// Number of worker threads the parallel path would use.
inline int effective_jobs(int jobs) {
#ifdef _OPENMP
  if (jobs > 1) return jobs;
#endif
  return 1;
}

}  // namespace shifterr
