#pragma once

#include <cstddef>
#include <string>

#include "wqed/types.hpp"

// Data-parallel inner loops of the solvers: squared-magnitude and
// conjugate-product reductions over amplitude rows, row scaling, and the
// characteristics row update. Scalar reference kernels plus AVX2 variants,
// selected once at startup (override with WQED_SIMD=scalar|avx2).

namespace wqed::kernels {

struct Ops {
    double (*sum_abs2)(const cd*, std::size_t);
    cd (*dot_conj)(const cd*, const cd*, std::size_t);
    void (*scale)(cd*, const cd*, cd, std::size_t);
    // out[i] = decay * (prev[i] + h * s_prev[i]) + h * s_cur[i]
    void (*march_row)(cd*, const cd*, const cd*, const cd*, cd, double, std::size_t);
    const char* name;
};

namespace scalar {
double sum_abs2(const cd* v, std::size_t n);
cd dot_conj(const cd* a, const cd* b, std::size_t n);
void scale(cd* out, const cd* in, cd z, std::size_t n);
void march_row(cd* out, const cd* prev, const cd* s_prev, const cd* s_cur, cd decay,
               double h, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double sum_abs2(const cd* v, std::size_t n);
cd dot_conj(const cd* a, const cd* b, std::size_t n);
void scale(cd* out, const cd* in, cd z, std::size_t n);
void march_row(cd* out, const cd* prev, const cd* s_prev, const cd* s_cur, cd decay,
               double h, std::size_t n);
}  // namespace avx2
bool avx2_available();
#endif

/// Active implementation (resolved once, thread-safe).
const Ops& active();

inline double sum_abs2(const cd* v, std::size_t n) { return active().sum_abs2(v, n); }
inline cd dot_conj(const cd* a, const cd* b, std::size_t n) { return active().dot_conj(a, b, n); }
inline void scale(cd* out, const cd* in, cd z, std::size_t n) { active().scale(out, in, z, n); }
inline void march_row(cd* out, const cd* prev, const cd* s_prev, const cd* s_cur, cd decay,
                      double h, std::size_t n) {
    active().march_row(out, prev, s_prev, s_cur, decay, h, n);
}

}  // namespace wqed::kernels
