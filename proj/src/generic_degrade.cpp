// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "hmbsynth/generic_degrade.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hmbsynth/error.hpp"
#include "hmbsynth/image_io.hpp"
#include "hmbsynth/simd.hpp"

namespace hmbsynth {

namespace {

void check_prob(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::InvalidParams, std::string(name) + " must lie in [0,1]");
}

void check_range(const Range& r, double lo, double hi, const char* name) {
    if (!(r.lo <= r.hi) || r.lo < lo || r.hi > hi) {
        fail(ErrorCode::InvalidParams, std::string(name) + " range must satisfy " + std::to_string(lo) +
                                           " <= lo <= hi <= " + std::to_string(hi));
    }
}

struct AxisTaps {
    std::vector<int> start;          // per output index, offset into index/weight
    std::vector<int> count;
    std::vector<int> index;
    std::vector<double> weight;
};

double cubic_weight(double t) {
    constexpr double a = -0.5;
    t = std::fabs(t);
    if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
    return 0.0;
}

AxisTaps build_taps(int in_n, int out_n, ResizeFilter filter) {
    AxisTaps taps;
    taps.start.resize(out_n);
    taps.count.resize(out_n);
    const double ratio = static_cast<double>(in_n) / out_n;
    auto clampi = [&](long i) { return static_cast<int>(std::clamp<long>(i, 0, in_n - 1)); };
    for (int o = 0; o < out_n; ++o) {
        std::vector<std::pair<int, double>> local;
        if (filter == ResizeFilter::Area) {
            const double a = o * ratio;
            const double b = (o + 1) * ratio;
            for (long i = static_cast<long>(std::floor(a)); i < static_cast<long>(std::ceil(b)); ++i) {
                const double overlap = std::min<double>(b, i + 1) - std::max<double>(a, i);
                if (overlap > 0.0) local.emplace_back(clampi(i), overlap);
            }
        } else {
            const double src = (o + 0.5) * ratio - 0.5;
            const double base = std::floor(src);
            const double f = src - base;
            const long i0 = static_cast<long>(base);
            if (filter == ResizeFilter::Bilinear) {
                local.emplace_back(clampi(i0), 1.0 - f);
                if (f != 0.0) local.emplace_back(clampi(i0 + 1), f);
            } else {
                for (long k = -1; k <= 2; ++k) {
                    const double wgt = cubic_weight(static_cast<double>(k) - f);
                    if (wgt != 0.0) local.emplace_back(clampi(i0 + k), wgt);
                }
            }
        }
        double total = 0.0;
        for (const auto& [i, w] : local) total += w;
        taps.start[o] = static_cast<int>(taps.index.size());
        taps.count[o] = static_cast<int>(local.size());
        for (const auto& [i, w] : local) {
            taps.index.push_back(i);
            taps.weight.push_back(w / total);
        }
    }
    return taps;
}

}  // namespace

std::string to_string(ResizeFilter filter) {
    switch (filter) {
        case ResizeFilter::Area: return "area";
        case ResizeFilter::Bilinear: return "bilinear";
        case ResizeFilter::Bicubic: return "bicubic";
    }
    return "unknown";
}

ResizeFilter resize_filter_from_string(const std::string& name) {
    if (name == "area") return ResizeFilter::Area;
    if (name == "bilinear") return ResizeFilter::Bilinear;
    if (name == "bicubic") return ResizeFilter::Bicubic;
    fail(ErrorCode::InvalidParams, "unknown resize filter '" + name + "'");
}

void GenericParams::validate() const {
    if (blur.kernel_size_min < 3 || blur.kernel_size_min > blur.kernel_size_max || blur.kernel_size_min % 2 == 0 ||
        blur.kernel_size_max % 2 == 0) {
        fail(ErrorCode::InvalidParams, "blur kernel sizes must be odd with 3 <= min <= max");
    }
    check_range(blur.sigma, 1e-6, 1e6, "blur.sigma");
    check_range(blur.rotation, -1e3, 1e3, "blur.rotation");
    check_prob(blur.isotropic_prob, "blur.isotropic_prob");
    check_prob(blur.skip_prob, "blur.skip_prob");
    check_range(resize.scale, 1e-3, 1e3, "resize.scale");
    if (resize.filters.empty()) fail(ErrorCode::InvalidParams, "resize.filters must not be empty");
    check_prob(resize.skip_prob, "resize.skip_prob");
    check_range(noise.gaussian_sigma, 0.0, 1.0, "noise.gaussian_sigma");
    check_range(noise.poisson_scale, 1e-6, 1e6, "noise.poisson_scale");
    check_prob(noise.gaussian_prob, "noise.gaussian_prob");
    check_prob(noise.skip_prob, "noise.skip_prob");
    if (jpeg.quality_min < 30 || jpeg.quality_max > 100 || jpeg.quality_min > jpeg.quality_max) {
        fail(ErrorCode::InvalidParams, "jpeg quality range must satisfy 30 <= min <= max <= 100");
    }
    check_prob(jpeg.skip_prob, "jpeg.skip_prob");
}

GenericParams GenericParams::all_skipped() {
    GenericParams p;
    p.blur.skip_prob = 1.0;
    p.resize.skip_prob = 1.0;
    p.noise.skip_prob = 1.0;
    p.jpeg.skip_prob = 1.0;
    return p;
}

Psf anisotropic_gaussian_kernel(int size, double sigma_x, double sigma_y, double rotation) {
    if (size < 1 || size % 2 == 0) fail(ErrorCode::InvalidParams, "blur kernel size must be odd");
    if (!(sigma_x > 0.0) || !(sigma_y > 0.0)) fail(ErrorCode::InvalidParams, "blur sigmas must be > 0");
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    const double ix = 1.0 / (sigma_x * sigma_x);
    const double iy = 1.0 / (sigma_y * sigma_y);
    // Inverse covariance R diag(ix, iy) R^T.
    const double a = c * c * ix + s * s * iy;
    const double b = c * s * (ix - iy);
    const double d = s * s * ix + c * c * iy;
    Psf k{size, std::vector<double>(static_cast<std::size_t>(size) * size)};
    const int r = size / 2;
    double total = 0.0;
    for (int row = 0; row < size; ++row) {
        const double y = row - r;
        for (int col = 0; col < size; ++col) {
            const double x = col - r;
            const double q = a * x * x + 2.0 * b * x * y + d * y * y;
            k.at(row, col) = std::exp(-0.5 * q);
            total += k.at(row, col);
        }
    }
    for (double& v : k.weights) v /= total;
    return k;
}

std::pair<Psf, BlurDraw> sample_blur_kernel(const GenericParams::Blur& params, RngStream& rng) {
    if (params.kernel_size_min % 2 == 0 || params.kernel_size_max % 2 == 0 ||
        params.kernel_size_min > params.kernel_size_max || params.kernel_size_min < 1) {
        fail(ErrorCode::InvalidParams, "blur kernel size range must hold odd values");
    }
    BlurDraw draw;
    const auto half_lo = params.kernel_size_min / 2;
    const auto half_hi = params.kernel_size_max / 2;
    draw.kernel_size = static_cast<int>(2 * rng.uniform_int(half_lo, half_hi) + 1);
    draw.isotropic = rng.bernoulli(params.isotropic_prob);
    draw.sigma_x = rng.uniform(params.sigma.lo, params.sigma.hi);
    const double sy = rng.uniform(params.sigma.lo, params.sigma.hi);
    const double rot = rng.uniform(params.rotation.lo, params.rotation.hi);
    draw.sigma_y = draw.isotropic ? draw.sigma_x : sy;
    draw.rotation = draw.isotropic ? 0.0 : rot;
    return {anisotropic_gaussian_kernel(draw.kernel_size, draw.sigma_x, draw.sigma_y, draw.rotation), draw};
}

Image apply_kernel(const Image& image, const Psf& kernel, BorderMode mode) {
    return fft_convolve(image, kernel, mode);
}

Image resize_to(const Image& image, int height, int width, ResizeFilter filter) {
    if (height < 1 || width < 1) {
        fail(ErrorCode::DegenerateOutput,
             "resize output " + std::to_string(height) + "x" + std::to_string(width) + " is empty");
    }
    if (height == image.height() && width == image.width()) {
        // Every filter reduces to a single unit tap at equal size.
        return image;
    }
    const AxisTaps htaps = build_taps(image.width(), width, filter);
    const AxisTaps vtaps = build_taps(image.height(), height, filter);
    const auto& k = simd::kernels();
    const int in_h = image.height();
    const int in_w = image.width();
    Image out(height, width);
    std::vector<float> tmp(static_cast<std::size_t>(in_h) * width);
    for (int c = 0; c < Image::kChannels; ++c) {
        const auto src = image.plane(c);
        for (int y = 0; y < in_h; ++y) {
            const float* srow = src.data() + static_cast<std::size_t>(y) * in_w;
            float* trow = tmp.data() + static_cast<std::size_t>(y) * width;
            for (int x = 0; x < width; ++x) {
                double acc = 0.0;
                for (int t = 0; t < htaps.count[x]; ++t) {
                    const int idx = htaps.start[x] + t;
                    acc += htaps.weight[idx] * srow[htaps.index[idx]];
                }
                trow[x] = static_cast<float>(acc);
            }
        }
        auto dst = out.plane(c);
        for (int y = 0; y < height; ++y) {
            float* drow = dst.data() + static_cast<std::size_t>(y) * width;
            for (int t = 0; t < vtaps.count[y]; ++t) {
                const int idx = vtaps.start[y] + t;
                k.axpy(static_cast<float>(vtaps.weight[idx]), tmp.data() + static_cast<std::size_t>(vtaps.index[idx]) * width,
                       drow, static_cast<std::size_t>(width));
            }
        }
        k.clamp01(dst.data(), dst.size());
    }
    return out;
}

Image resize(const Image& image, double scale, ResizeFilter filter) {
    if (!(scale > 0.0) || !std::isfinite(scale)) fail(ErrorCode::InvalidParams, "resize scale must be > 0");
    const int h = static_cast<int>(std::lround(image.height() * scale));
    const int w = static_cast<int>(std::lround(image.width() * scale));
    return resize_to(image, h, w, filter);
}

Image add_gaussian_noise(const Image& image, double sigma, RngStream& rng) {
    if (!(sigma >= 0.0)) fail(ErrorCode::InvalidParams, "noise sigma must be >= 0");
    if (sigma == 0.0) return image;
    Image out = image;
    for (float& v : out.values()) v = static_cast<float>(v + sigma * rng.normal());
    simd::kernels().clamp01(out.values().data(), out.values().size());
    return out;
}

Image add_poisson_noise(const Image& image, double scale, RngStream& rng) {
    if (!(scale > 0.0)) fail(ErrorCode::InvalidParams, "poisson scale must be > 0");
    const double counts = 255.0 / scale;
    Image out = image;
    for (float& v : out.values()) {
        const double mean = std::max(0.0, static_cast<double>(v)) * counts;
        v = static_cast<float>(static_cast<double>(rng.poisson(mean)) / counts);
    }
    simd::kernels().clamp01(out.values().data(), out.values().size());
    return out;
}

Image jpeg_roundtrip(const Image& image, int quality) {
    if (quality < 30 || quality > 100) {
        fail(ErrorCode::EncodeError, "JPEG quality " + std::to_string(quality) + " outside [30,100]");
    }
    const auto bytes = encode_jpeg(image, quality);
    return decode_jpeg(bytes);
}

Image apply_generic(const Image& image, const GenericParams& params, RngStream& rng, GenericDraws& draws) {
    draws = {};
    Image cur = image;

    if (!rng.bernoulli(params.blur.skip_prob)) {
        auto [kernel, draw] = sample_blur_kernel(params.blur, rng);
        // Small intermediates cannot host the largest kernels.
        int side = std::min(cur.height(), cur.width());
        if (side % 2 == 0) --side;
        if (draw.kernel_size > side) {
            draw.kernel_size = std::max(1, side);
            kernel = anisotropic_gaussian_kernel(draw.kernel_size, draw.sigma_x, draw.sigma_y, draw.rotation);
        }
        cur = apply_kernel(cur, kernel, BorderMode::Reflect);
        draws.blur = draw;
    }

    if (!rng.bernoulli(params.resize.skip_prob)) {
        ResizeDraw draw;
        draw.scale = rng.uniform(params.resize.scale.lo, params.resize.scale.hi);
        const auto fi = rng.uniform_int(0, static_cast<std::int64_t>(params.resize.filters.size()) - 1);
        draw.filter = params.resize.filters[static_cast<std::size_t>(fi)];
        draw.height = std::max(1, static_cast<int>(std::lround(cur.height() * draw.scale)));
        draw.width = std::max(1, static_cast<int>(std::lround(cur.width() * draw.scale)));
        cur = resize_to(cur, draw.height, draw.width, draw.filter);
        draws.resize = draw;
    }

    if (!rng.bernoulli(params.noise.skip_prob)) {
        NoiseDraw draw;
        if (rng.bernoulli(params.noise.gaussian_prob)) {
            draw.kind = NoiseDraw::Kind::Gaussian;
            draw.gaussian_sigma = rng.uniform(params.noise.gaussian_sigma.lo, params.noise.gaussian_sigma.hi);
            cur = add_gaussian_noise(cur, draw.gaussian_sigma, rng);
        } else {
            draw.kind = NoiseDraw::Kind::Poisson;
            draw.poisson_scale = rng.uniform(params.noise.poisson_scale.lo, params.noise.poisson_scale.hi);
            cur = add_poisson_noise(cur, draw.poisson_scale, rng);
        }
        draws.noise = draw;
    }

    if (!rng.bernoulli(params.jpeg.skip_prob)) {
        JpegDraw draw;
        draw.quality = static_cast<int>(rng.uniform_int(params.jpeg.quality_min, params.jpeg.quality_max));
        cur = jpeg_roundtrip(cur, draw.quality);
        draws.jpeg = draw;
    }
    return cur;
}

}  // namespace hmbsynth
