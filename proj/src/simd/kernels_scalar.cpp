// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "hmbsynth/simd.hpp"

namespace hmbsynth::simd {

namespace {

void axpy(float a, const float* x, float* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const float t = a * x[i];
        y[i] = y[i] + t;
    }
}

void min_inplace(float* y, const float* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] < y[i] ? x[i] : y[i];
}

void max_inplace(float* y, const float* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > y[i] ? x[i] : y[i];
}

void blend(const float* sharp, const float* blurred, const float* w, float* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const float s = sharp[i];
        const float b = blurred[i];
        const float a = w[i] * s;
        const float c = (1.0f - w[i]) * b;
        float v = a + c;
        const float lo = s < b ? s : b;
        const float hi = s > b ? s : b;
        v = v > lo ? v : lo;
        v = v < hi ? v : hi;
        out[i] = v;
    }
}

void clamp01(float* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        float v = y[i];
        v = v > 0.0f ? v : 0.0f;
        v = v < 1.0f ? v : 1.0f;
        y[i] = v;
    }
}

void complex_mul(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        const double ar = a[2 * k], ai = a[2 * k + 1];
        const double br = b[2 * k], bi = b[2 * k + 1];
        const double rr = ar * br;
        const double ii = ai * bi;
        const double ri = ar * bi;
        const double ir = ai * br;
        out[2 * k] = rr - ii;
        out[2 * k + 1] = ir + ri;
    }
}

void sobel_row(const float* up, const float* mid, const float* down, float* out, std::size_t n, float scale) {
    for (std::size_t i = 0; i < n; ++i) {
        const std::ptrdiff_t x = static_cast<std::ptrdiff_t>(i);
        const float d_up = up[x + 1] - up[x - 1];
        const float d_mid = mid[x + 1] - mid[x - 1];
        const float d_down = down[x + 1] - down[x - 1];
        const float gx = (d_up + (d_mid + d_mid)) + d_down;
        const float v_left = down[x - 1] - up[x - 1];
        const float v_mid = down[x] - up[x];
        const float v_right = down[x + 1] - up[x + 1];
        const float gy = (v_left + (v_mid + v_mid)) + v_right;
        const float gx2 = gx * gx;
        const float gy2 = gy * gy;
        out[i] = std::sqrt(gx2 + gy2) * scale;
    }
}

double sum(const float* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double dot(const float* x, const float* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(x[i]) * y[i];
    return acc;
}

double sum_abs_diff(const float* x, const float* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::fabs(static_cast<double>(x[i]) - y[i]);
    return acc;
}

double sum_sq_diff(const float* x, const float* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(x[i]) - y[i];
        acc += d * d;
    }
    return acc;
}

}  // namespace

const Kernels& scalar_kernels() noexcept {
    static const Kernels table{Level::Scalar, axpy,      min_inplace, max_inplace,  blend,       clamp01,
                               complex_mul,   sobel_row, sum,         dot,          sum_abs_diff, sum_sq_diff};
    return table;
}

}  // namespace hmbsynth::simd
