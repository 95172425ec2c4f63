#include "ffdg/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>

namespace ffdg::par {

namespace {

int env_default() {
#ifdef _OPENMP
    int nt = omp_get_max_threads();
#else
    int nt = 1;
#endif
    if (const char* env = std::getenv("FFDG_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) nt = std::min(nt, cap);
    }
    return std::max(nt, 1);
}

std::atomic<int> g_override{0};

}  // namespace

int max_threads() {
    const int ov = g_override.load(std::memory_order_relaxed);
    if (ov > 0) return ov;
    static const int def = env_default();
    return def;
}

void set_max_threads(int n) { g_override.store(n > 0 ? n : 0, std::memory_order_relaxed); }

}  // namespace ffdg::par
