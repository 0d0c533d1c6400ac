#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qpg::par {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Work is split into fixed-size blocks indexed 0..n_blocks-1 so that results
// are identical for any thread count: each block computes independently
// (typically from its own RNG substream) and writes to disjoint output.
inline std::size_t block_count(std::size_t n, std::size_t block) {
  return (n + block - 1) / block;
}

}  // namespace qpg::par
