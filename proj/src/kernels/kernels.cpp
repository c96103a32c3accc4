#include "wqed/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace wqed::kernels {

namespace scalar {

double sum_abs2(const cd* v, std::size_t n) {
    const double* p = reinterpret_cast<const double*>(v);
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s0 += p[2 * i] * p[2 * i];
        s1 += p[2 * i + 1] * p[2 * i + 1];
    }
    return s0 + s1;
}

cd dot_conj(const cd* a, const cd* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double ar = pa[2 * i], ai = pa[2 * i + 1];
        double br = pb[2 * i], bi = pb[2 * i + 1];
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return {re, im};
}

void scale(cd* out, const cd* in, cd z, std::size_t n) {
    const double zr = z.real(), zi = z.imag();
    const double* p = reinterpret_cast<const double*>(in);
    double* q = reinterpret_cast<double*>(out);
    for (std::size_t i = 0; i < n; ++i) {
        double r = p[2 * i], m = p[2 * i + 1];
        q[2 * i] = zr * r - zi * m;
        q[2 * i + 1] = zr * m + zi * r;
    }
}

void march_row(cd* out, const cd* prev, const cd* s_prev, const cd* s_cur, cd decay,
               double h, std::size_t n) {
    const double dr = decay.real(), di = decay.imag();
    const double* pp = reinterpret_cast<const double*>(prev);
    const double* sp = reinterpret_cast<const double*>(s_prev);
    const double* sc = reinterpret_cast<const double*>(s_cur);
    double* q = reinterpret_cast<double*>(out);
    for (std::size_t i = 0; i < n; ++i) {
        double ur = pp[2 * i] + h * sp[2 * i];
        double ui = pp[2 * i + 1] + h * sp[2 * i + 1];
        q[2 * i] = dr * ur - di * ui + h * sc[2 * i];
        q[2 * i + 1] = dr * ui + di * ur + h * sc[2 * i + 1];
    }
}

}  // namespace scalar

namespace {

Ops make_scalar() {
    return Ops{scalar::sum_abs2, scalar::dot_conj, scalar::scale, scalar::march_row, "scalar"};
}

#if defined(__x86_64__) || defined(_M_X64)
Ops make_avx2() {
    return Ops{avx2::sum_abs2, avx2::dot_conj, avx2::scale, avx2::march_row, "avx2"};
}
#endif

Ops resolve() {
    const char* env = std::getenv("WQED_SIMD");
#if defined(__x86_64__) || defined(_M_X64)
    if (env && std::strcmp(env, "scalar") == 0) return make_scalar();
    if (avx2_available()) return make_avx2();
    if (env && std::strcmp(env, "avx2") == 0)
        throw ConfigError("WQED_SIMD=avx2 requested but AVX2 not available");
#else
    (void)env;
#endif
    return make_scalar();
}

}  // namespace

#if defined(__x86_64__) || defined(_M_X64)
bool avx2_available() { return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"); }
#endif

const Ops& active() {
    static const Ops ops = resolve();
    return ops;
}

}  // namespace wqed::kernels
