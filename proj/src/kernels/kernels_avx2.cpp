#include <immintrin.h>

#include "wqed/kernels.hpp"

#ifndef __AVX2__
#error kernels_avx2.cpp must be compiled with -mavx2 -mfma
#endif

// One __m256d holds two complex<double> values as (re0, im0, re1, im1).

namespace wqed::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// (a * b) with a, b holding two complex numbers each
inline __m256d cmul(__m256d a, __m256d b) {
    __m256d br = _mm256_movedup_pd(b);                  // (br0, br0, br1, br1)
    __m256d bi = _mm256_permute_pd(b, 0xF);             // (bi0, bi0, bi1, bi1)
    __m256d as = _mm256_permute_pd(a, 0x5);             // (ai0, ar0, ai1, ar1)
    return _mm256_fmaddsub_pd(a, br, _mm256_mul_pd(as, bi));
}

}  // namespace

double sum_abs2(const cd* v, std::size_t n) {
    const double* p = reinterpret_cast<const double*>(v);
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0, n2 = 2 * n;
    for (; i + 8 <= n2; i += 8) {
        __m256d x0 = _mm256_loadu_pd(p + i);
        __m256d x1 = _mm256_loadu_pd(p + i + 4);
        acc0 = _mm256_fmadd_pd(x0, x0, acc0);
        acc1 = _mm256_fmadd_pd(x1, x1, acc1);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n2; ++i) s += p[i] * p[i];
    return s;
}

cd dot_conj(const cd* a, const cd* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    __m256d acc_re = _mm256_setzero_pd(), acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d x = _mm256_loadu_pd(pa + 2 * i);
        __m256d y = _mm256_loadu_pd(pb + 2 * i);
        acc_re = _mm256_fmadd_pd(x, y, acc_re);          // (ar br, ai bi) pairs
        __m256d xs = _mm256_permute_pd(x, 0x5);          // (ai, ar)
        acc_im = _mm256_fmadd_pd(xs, y, acc_im);         // (ai br, ar bi) pairs
    }
    // re = sum over all lanes of acc_re; im = sum of (odd - even) lanes of acc_im
    double re = hsum(acc_re);
    __m256d neg = _mm256_set_pd(1.0, -1.0, 1.0, -1.0);   // set_pd lists high..low
    double im = hsum(_mm256_mul_pd(acc_im, neg));
    for (; i < n; ++i) {
        double ar = pa[2 * i], ai = pa[2 * i + 1];
        double br = pb[2 * i], bi = pb[2 * i + 1];
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return {re, im};
}

void scale(cd* out, const cd* in, cd z, std::size_t n) {
    const double* p = reinterpret_cast<const double*>(in);
    double* q = reinterpret_cast<double*>(out);
    __m256d zv = _mm256_set_pd(z.imag(), z.real(), z.imag(), z.real());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        _mm256_storeu_pd(q + 2 * i, cmul(_mm256_loadu_pd(p + 2 * i), zv));
    }
    for (; i < n; ++i) {
        double r = p[2 * i], m = p[2 * i + 1];
        q[2 * i] = z.real() * r - z.imag() * m;
        q[2 * i + 1] = z.real() * m + z.imag() * r;
    }
}

void march_row(cd* out, const cd* prev, const cd* s_prev, const cd* s_cur, cd decay,
               double h, std::size_t n) {
    const double* pp = reinterpret_cast<const double*>(prev);
    const double* sp = reinterpret_cast<const double*>(s_prev);
    const double* sc = reinterpret_cast<const double*>(s_cur);
    double* q = reinterpret_cast<double*>(out);
    __m256d dv = _mm256_set_pd(decay.imag(), decay.real(), decay.imag(), decay.real());
    __m256d hv = _mm256_set1_pd(h);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d u = _mm256_fmadd_pd(hv, _mm256_loadu_pd(sp + 2 * i), _mm256_loadu_pd(pp + 2 * i));
        __m256d r = _mm256_fmadd_pd(hv, _mm256_loadu_pd(sc + 2 * i), cmul(u, dv));
        _mm256_storeu_pd(q + 2 * i, r);
    }
    for (; i < n; ++i) {
        double ur = pp[2 * i] + h * sp[2 * i];
        double ui = pp[2 * i + 1] + h * sp[2 * i + 1];
        q[2 * i] = decay.real() * ur - decay.imag() * ui + h * sc[2 * i];
        q[2 * i + 1] = decay.real() * ui + decay.imag() * ur + h * sc[2 * i + 1];
    }
}

}  // namespace wqed::kernels::avx2
