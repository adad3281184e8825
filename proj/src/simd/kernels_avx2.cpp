// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

// Built with -mavx2 and without -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "hmbsynth/simd.hpp"

namespace hmbsynth::simd {

namespace {

void axpy(float a, const float* x, float* y, std::size_t n) {
    const __m256 va = _mm256_set1_ps(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 t = _mm256_mul_ps(va, _mm256_loadu_ps(x + i));
        _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(y + i), t));
    }
    for (; i < n; ++i) {
        const float t = a * x[i];
        y[i] = y[i] + t;
    }
}

void min_inplace(float* y, const float* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(y + i, _mm256_min_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
    }
    for (; i < n; ++i) y[i] = x[i] < y[i] ? x[i] : y[i];
}

void max_inplace(float* y, const float* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(y + i, _mm256_max_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
    }
    for (; i < n; ++i) y[i] = x[i] > y[i] ? x[i] : y[i];
}

void blend(const float* sharp, const float* blurred, const float* w, float* out, std::size_t n) {
    const __m256 one = _mm256_set1_ps(1.0f);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 s = _mm256_loadu_ps(sharp + i);
        const __m256 b = _mm256_loadu_ps(blurred + i);
        const __m256 wv = _mm256_loadu_ps(w + i);
        const __m256 a = _mm256_mul_ps(wv, s);
        const __m256 c = _mm256_mul_ps(_mm256_sub_ps(one, wv), b);
        __m256 v = _mm256_add_ps(a, c);
        const __m256 lo = _mm256_min_ps(s, b);
        const __m256 hi = _mm256_max_ps(s, b);
        v = _mm256_max_ps(v, lo);
        v = _mm256_min_ps(v, hi);
        _mm256_storeu_ps(out + i, v);
    }
    if (i < n) scalar_kernels().blend(sharp + i, blurred + i, w + i, out + i, n - i);
}

void clamp01(float* y, std::size_t n) {
    const __m256 zero = _mm256_setzero_ps();
    const __m256 one = _mm256_set1_ps(1.0f);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 v = _mm256_loadu_ps(y + i);
        v = _mm256_max_ps(v, zero);
        v = _mm256_min_ps(v, one);
        _mm256_storeu_ps(y + i, v);
    }
    if (i < n) scalar_kernels().clamp01(y + i, n - i);
}

void complex_mul(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const __m256d va = _mm256_loadu_pd(a + 2 * k);
        const __m256d vb = _mm256_loadu_pd(b + 2 * k);
        const __m256d b_re = _mm256_movedup_pd(vb);
        const __m256d b_im = _mm256_permute_pd(vb, 0xF);
        const __m256d a_swap = _mm256_permute_pd(va, 0x5);
        const __m256d t1 = _mm256_mul_pd(va, b_re);      // ar*br, ai*br
        const __m256d t2 = _mm256_mul_pd(a_swap, b_im);  // ai*bi, ar*bi
        _mm256_storeu_pd(out + 2 * k, _mm256_addsub_pd(t1, t2));
    }
    if (k < n) scalar_kernels().complex_mul(a + 2 * k, b + 2 * k, out + 2 * k, n - k);
}

void sobel_row(const float* up, const float* mid, const float* down, float* out, std::size_t n, float scale) {
    const __m256 vscale = _mm256_set1_ps(scale);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const float* u = up + i;
        const float* m = mid + i;
        const float* d = down + i;
        const __m256 ul = _mm256_loadu_ps(u - 1), uc = _mm256_loadu_ps(u), ur = _mm256_loadu_ps(u + 1);
        const __m256 ml = _mm256_loadu_ps(m - 1), mr = _mm256_loadu_ps(m + 1);
        const __m256 dl = _mm256_loadu_ps(d - 1), dc = _mm256_loadu_ps(d), dr = _mm256_loadu_ps(d + 1);
        const __m256 d_up = _mm256_sub_ps(ur, ul);
        const __m256 d_mid = _mm256_sub_ps(mr, ml);
        const __m256 d_down = _mm256_sub_ps(dr, dl);
        const __m256 gx = _mm256_add_ps(_mm256_add_ps(d_up, _mm256_add_ps(d_mid, d_mid)), d_down);
        const __m256 v_left = _mm256_sub_ps(dl, ul);
        const __m256 v_mid = _mm256_sub_ps(dc, uc);
        const __m256 v_right = _mm256_sub_ps(dr, ur);
        const __m256 gy = _mm256_add_ps(_mm256_add_ps(v_left, _mm256_add_ps(v_mid, v_mid)), v_right);
        const __m256 mag = _mm256_sqrt_ps(_mm256_add_ps(_mm256_mul_ps(gx, gx), _mm256_mul_ps(gy, gy)));
        _mm256_storeu_ps(out + i, _mm256_mul_ps(mag, vscale));
    }
    if (i < n) scalar_kernels().sobel_row(up + i, mid + i, down + i, out + i, n - i, scale);
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum(const float* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_cvtps_pd(_mm_loadu_ps(x + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_cvtps_pd(_mm_loadu_ps(x + i + 4)));
    }
    double total = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) total += x[i];
    return total;
}

double dot(const float* x, const float* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_cvtps_pd(_mm_loadu_ps(x + i)),
                                                 _mm256_cvtps_pd(_mm_loadu_ps(y + i))));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_cvtps_pd(_mm_loadu_ps(x + i + 4)),
                                                 _mm256_cvtps_pd(_mm_loadu_ps(y + i + 4))));
    }
    double total = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) total += static_cast<double>(x[i]) * y[i];
    return total;
}

double sum_abs_diff(const float* x, const float* y, std::size_t n) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_cvtps_pd(_mm_loadu_ps(x + i)), _mm256_cvtps_pd(_mm_loadu_ps(y + i)));
        const __m256d d1 =
            _mm256_sub_pd(_mm256_cvtps_pd(_mm_loadu_ps(x + i + 4)), _mm256_cvtps_pd(_mm_loadu_ps(y + i + 4)));
        acc0 = _mm256_add_pd(acc0, _mm256_andnot_pd(sign_mask, d0));
        acc1 = _mm256_add_pd(acc1, _mm256_andnot_pd(sign_mask, d1));
    }
    double total = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) total += std::fabs(static_cast<double>(x[i]) - y[i]);
    return total;
}

double sum_sq_diff(const float* x, const float* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_cvtps_pd(_mm_loadu_ps(x + i)), _mm256_cvtps_pd(_mm_loadu_ps(y + i)));
        const __m256d d1 =
            _mm256_sub_pd(_mm256_cvtps_pd(_mm_loadu_ps(x + i + 4)), _mm256_cvtps_pd(_mm_loadu_ps(y + i + 4)));
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, d1));
    }
    double total = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = static_cast<double>(x[i]) - y[i];
        total += d * d;
    }
    return total;
}

}  // namespace

const Kernels& avx2_kernels() noexcept {
    static const Kernels table{Level::Avx2, axpy,      min_inplace, max_inplace,  blend,       clamp01,
                               complex_mul, sobel_row, sum,         dot,          sum_abs_diff, sum_sq_diff};
    return table;
}

}  // namespace hmbsynth::simd
