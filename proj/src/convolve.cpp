// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "hmbsynth/convolve.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "hmbsynth/error.hpp"
#include "hmbsynth/simd.hpp"

namespace hmbsynth {

namespace {

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_alloc(std::size_t n) {
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
    if (!p) throw std::bad_alloc();
    return FftwBuffer<T>(p);
}

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
};

// Plans are created once per shape and live for the process. Planning is not
// thread-safe in FFTW; executing with the new-array interface is.
PlanPair plans_for(int rows, int cols) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find({rows, cols});
    if (it != cache.end()) return it->second;
    const std::size_t real_n = static_cast<std::size_t>(rows) * cols;
    const std::size_t spec_n = static_cast<std::size_t>(rows) * (cols / 2 + 1);
    auto real = fftw_alloc<double>(real_n);
    auto spec = fftw_alloc<fftw_complex>(spec_n);
    PlanPair p;
    p.forward = fftw_plan_dft_r2c_2d(rows, cols, real.get(), spec.get(), FFTW_ESTIMATE);
    p.inverse = fftw_plan_dft_c2r_2d(rows, cols, spec.get(), real.get(), FFTW_ESTIMATE);
    if (!p.forward || !p.inverse) fail(ErrorCode::InvalidParams, "FFTW planning failed");
    cache.emplace(std::make_pair(rows, cols), p);
    return p;
}

}  // namespace

int reflect_index(long i, int n) noexcept {
    if (n <= 1) return 0;
    const long period = 2L * (n - 1);
    long m = i % period;
    if (m < 0) m += period;
    return static_cast<int>(m < n ? m : period - m);
}

Image fft_convolve(const Image& image, const Psf& psf, BorderMode mode) {
    const int h = image.height();
    const int w = image.width();
    if (psf.size < 1 || psf.size % 2 == 0 ||
        psf.weights.size() != static_cast<std::size_t>(psf.size) * psf.size) {
        fail(ErrorCode::InvalidParams, "kernel must be square with odd side");
    }
    if (psf.size > std::min(h, w)) {
        fail(ErrorCode::KernelTooLarge, "kernel side " + std::to_string(psf.size) + " exceeds image side " +
                                            std::to_string(std::min(h, w)));
    }
    const int r = psf.radius();
    const int pad = mode == BorderMode::Reflect ? r : 0;
    const int rows = h + 2 * pad;
    const int cols = w + 2 * pad;
    const std::size_t real_n = static_cast<std::size_t>(rows) * cols;
    const std::size_t spec_n = static_cast<std::size_t>(rows) * (cols / 2 + 1);
    const PlanPair plans = plans_for(rows, cols);

    auto real = fftw_alloc<double>(real_n);
    auto kernel_spec = fftw_alloc<fftw_complex>(spec_n);
    auto image_spec = fftw_alloc<fftw_complex>(spec_n);

    std::fill(real.get(), real.get() + real_n, 0.0);
    for (int i = 0; i < psf.size; ++i) {
        const int row = ((i - r) % rows + rows) % rows;
        for (int j = 0; j < psf.size; ++j) {
            const int col = ((j - r) % cols + cols) % cols;
            real[static_cast<std::size_t>(row) * cols + col] += psf.at(i, j);
        }
    }
    fftw_execute_dft_r2c(plans.forward, real.get(), kernel_spec.get());

    const auto& k = simd::kernels();
    const double inv_n = 1.0 / static_cast<double>(real_n);
    Image out(h, w);
    for (int c = 0; c < Image::kChannels; ++c) {
        const auto src = image.plane(c);
        for (int y = 0; y < rows; ++y) {
            const int sy = reflect_index(y - pad, h);
            double* dst = real.get() + static_cast<std::size_t>(y) * cols;
            const float* srow = src.data() + static_cast<std::size_t>(sy) * w;
            for (int x = 0; x < cols; ++x) dst[x] = srow[reflect_index(x - pad, w)];
        }
        fftw_execute_dft_r2c(plans.forward, real.get(), image_spec.get());
        k.complex_mul(reinterpret_cast<const double*>(image_spec.get()),
                      reinterpret_cast<const double*>(kernel_spec.get()),
                      reinterpret_cast<double*>(image_spec.get()), spec_n);
        fftw_execute_dft_c2r(plans.inverse, image_spec.get(), real.get());
        auto dst = out.plane(c);
        for (int y = 0; y < h; ++y) {
            const double* srow = real.get() + static_cast<std::size_t>(y + pad) * cols + pad;
            float* drow = dst.data() + static_cast<std::size_t>(y) * w;
            for (int x = 0; x < w; ++x) drow[x] = static_cast<float>(srow[x] * inv_n);
        }
        k.clamp01(dst.data(), dst.size());
    }
    return out;
}

}  // namespace hmbsynth
