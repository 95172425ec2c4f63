#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ffdg::par {

// Worker cap: FFDG_THREADS from the environment, clamped to the OpenMP
// maximum. 1 means fully serial. All kernels are written so the result is
// bit-identical for every thread count; the cap only trades wall time.
int max_threads();

// Override for tests and benchmarks; n <= 0 restores the environment default.
void set_max_threads(int n);

// Runs fn(i) for i in [0, n). Each index is computed by exactly one worker,
// so results are independent of scheduling as long as fn(i) only writes
// state owned by index i.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const int nt = max_threads();
    if (nt <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for num_threads(nt) schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        fn(static_cast<std::size_t>(i));
#else
    for (std::size_t i = 0; i < n; ++i) fn(i);
#endif
}

}  // namespace ffdg::par
