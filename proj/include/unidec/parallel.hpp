#pragma once
#include <cstdint>
#include <cstdlib>
#ifdef _OPENMP
#include <omp.h>
#endif

namespace unidec {

// Execution backend for the hot kernels. Serial is kept as a reference
// implementation; tests assert both produce identical results.
enum class Exec { Serial, Parallel };

// Worker cap: UNIDEC_THREADS wins over the OpenMP default.
inline int max_threads() {
  static int cached = [] {
    if (const char* s = std::getenv("UNIDEC_THREADS")) {
      int v = std::atoi(s);
      if (v >= 1) return v;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
  }();
  return cached;
}

// Independent-iteration loop. Results must not depend on iteration order;
// reductions are done by storing per-index values and combining serially.
template <class F>
void parallel_for(std::int64_t count, Exec exec, F&& body) {
#ifdef _OPENMP
  if (exec == Exec::Parallel && max_threads() > 1 && count > 1) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
#endif
  (void)exec;
  for (std::int64_t i = 0; i < count; ++i) body(i);
}

}  // namespace unidec
