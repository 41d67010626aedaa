#pragma once

#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fwb {

// Worker cap for parallel sweeps; 0 means "use the OpenMP default".
void set_max_jobs(int jobs);
int max_jobs();

// Reference loop. Same contract as parallel_for.
template <class Body>
void serial_for(long n, Body&& body) {
  for (long i = 0; i < n; ++i) body(i);
}

// Runs body(i) for every i in [0, n) on up to max_jobs() threads. Iterations
// must be independent; results go into per-index slots. The first exception
// thrown by any iteration is rethrown once the loop has finished.
template <class Body>
void parallel_for(long n, Body&& body) {
#ifdef _OPENMP
  std::exception_ptr error;
  std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic, 1) num_threads(max_jobs())
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
#else
  serial_for(n, body);
#endif
}

}  // namespace fwb
