// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string_view>

namespace hmbsynth::simd {

enum class Level { Scalar, Avx2 };

std::string_view to_string(Level level) noexcept;

/// Inner-loop kernels. Every variant of the elementwise kernels produces
/// bit-identical results (no fused multiply-add, same operation order); the
/// reductions accumulate in double and may differ in the last bits.
struct Kernels {
    Level level;

    /// y[i] += a * x[i]
    void (*axpy)(float a, const float* x, float* y, std::size_t n);
    /// y[i] = min(y[i], x[i])
    void (*min_inplace)(float* y, const float* x, std::size_t n);
    /// y[i] = max(y[i], x[i])
    void (*max_inplace)(float* y, const float* x, std::size_t n);
    /// out = clamp(w*sharp + (1-w)*blurred, min(sharp,blurred), max(sharp,blurred))
    void (*blend)(const float* sharp, const float* blurred, const float* w, float* out, std::size_t n);
    /// y[i] = clamp(y[i], 0, 1)
    void (*clamp01)(float* y, std::size_t n);
    /// Interleaved complex product out[k] = a[k] * b[k] over n complex values.
    void (*complex_mul)(const double* a, const double* b, double* out, std::size_t n);
    /// Sobel gradient magnitude for one row. up/mid/down point at column 0 of
    /// rows that are readable at columns -1 and n.
    void (*sobel_row)(const float* up, const float* mid, const float* down, float* out, std::size_t n,
                      float scale);

    double (*sum)(const float* x, std::size_t n);
    double (*dot)(const float* x, const float* y, std::size_t n);
    double (*sum_abs_diff)(const float* x, const float* y, std::size_t n);
    double (*sum_sq_diff)(const float* x, const float* y, std::size_t n);
};

const Kernels& scalar_kernels() noexcept;
#if defined(__x86_64__) || defined(_M_X64)
const Kernels& avx2_kernels() noexcept;
#endif

bool supported(Level level) noexcept;

/// Kernels for the active level. The default is the best supported level,
/// overridable with HMBSYNTH_SIMD=scalar|avx2 in the environment.
const Kernels& kernels() noexcept;
const Kernels& kernels(Level level);
Level active_level() noexcept;
/// Throws Error(InvalidParams) when the host cannot run the level.
void set_level(Level level);

}  // namespace hmbsynth::simd
