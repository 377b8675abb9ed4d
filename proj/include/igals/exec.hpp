#pragma once

#ifdef IGALS_HAVE_OPENMP
#include <omp.h>
#endif

namespace igals {

/// Execution policy for the data-parallel kernels (assembly, quadrature sweeps).
/// kSerial is the reference path; kParallel must produce entrywise identical
/// results (contributions are reduced in a fixed order regardless of scheduling).
enum class Exec { kSerial, kParallel };

inline int num_threads() {
#ifdef IGALS_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace igals
