#pragma once

#include <cstdlib>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace convexa {

// Number of workers parallel_for will use right now (1 without OpenMP).
inline int max_workers() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Scoped override of the worker count; restores the previous limit on exit.
// Used by the determinism checks to run the same scan with 1 and N workers.
class ThreadLimit {
 public:
  explicit ThreadLimit(int workers) {
#ifdef _OPENMP
    previous_ = omp_get_max_threads();
    if (workers > 0) omp_set_num_threads(workers);
#else
    (void)workers;
#endif
  }
  ~ThreadLimit() {
#ifdef _OPENMP
    omp_set_num_threads(previous_);
#endif
  }
  ThreadLimit(const ThreadLimit&) = delete;
  ThreadLimit& operator=(const ThreadLimit&) = delete;

 private:
#ifdef _OPENMP
  int previous_ = 1;
#endif
};

// Data-parallel loop over [0, n). The body must only write to state owned by
// its own index (typically a preallocated slot per i) so that results do not
// depend on scheduling; reductions are then done serially in index order.
template <typename Body>
void parallel_for(long n, const Body& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) body(i);
#else
  for (long i = 0; i < n; ++i) body(i);
#endif
}

}  // namespace convexa
