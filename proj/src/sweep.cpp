#include "fwb/sweep.hpp"

#include <atomic>

namespace fwb {

namespace {
std::atomic<int> g_jobs{0};
}

void set_max_jobs(int jobs) { g_jobs = jobs < 0 ? 0 : jobs; }

int max_jobs() {
  int j = g_jobs.load();
#ifdef _OPENMP
  if (j == 0) j = omp_get_max_threads();
#else
  if (j == 0) j = 1;
#endif
  return j;
}

}  // namespace fwb
