// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hmbsynth/convolve.hpp"
#include "hmbsynth/image.hpp"
#include "hmbsynth/rng.hpp"
#include "hmbsynth/trajectory.hpp"

namespace hmbsynth {

enum class ResizeFilter { Area, Bilinear, Bicubic };

std::string to_string(ResizeFilter filter);
/// Throws InvalidParams on unknown names.
ResizeFilter resize_filter_from_string(const std::string& name);

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const Range&) const = default;
};

/// Sampling ranges for one order of generic degradation.
struct GenericParams {
    struct Blur {
        int kernel_size_min = 7;
        int kernel_size_max = 21;
        Range sigma{0.2, 3.0};
        Range rotation{0.0, 3.141592653589793};
        double isotropic_prob = 0.5;
        double skip_prob = 0.0;
    } blur;
    struct Resize {
        Range scale{0.25, 1.5};
        std::vector<ResizeFilter> filters{ResizeFilter::Area, ResizeFilter::Bilinear, ResizeFilter::Bicubic};
        double skip_prob = 0.0;
    } resize;
    struct Noise {
        Range gaussian_sigma{0.004, 0.06};
        Range poisson_scale{0.05, 2.0};
        double gaussian_prob = 0.5;
        double skip_prob = 0.0;
    } noise;
    struct Jpeg {
        int quality_min = 30;
        int quality_max = 95;
        double skip_prob = 0.0;
    } jpeg;

    void validate() const;
    /// Every sub-stage skipped.
    static GenericParams all_skipped();
};

struct BlurDraw {
    int kernel_size = 0;
    double sigma_x = 0.0;
    double sigma_y = 0.0;
    double rotation = 0.0;
    bool isotropic = false;
};

struct ResizeDraw {
    double scale = 1.0;
    ResizeFilter filter = ResizeFilter::Bilinear;
    int height = 0;
    int width = 0;
};

struct NoiseDraw {
    enum class Kind { Gaussian, Poisson } kind = Kind::Gaussian;
    double gaussian_sigma = 0.0;
    double poisson_scale = 0.0;
};

struct JpegDraw {
    int quality = 0;
};

/// What one generic order actually did; empty optionals are skipped stages.
struct GenericDraws {
    std::optional<BlurDraw> blur;
    std::optional<ResizeDraw> resize;
    std::optional<NoiseDraw> noise;
    std::optional<JpegDraw> jpeg;
};

/// Oriented Gaussian kernel exp(-x^T C^-1 x / 2) with C = R diag(sx^2, sy^2) R^T,
/// normalized to unit sum.
Psf anisotropic_gaussian_kernel(int size, double sigma_x, double sigma_y, double rotation);

/// Draws size, sigmas and rotation from the ranges; isotropic with
/// probability isotropic_prob (then sigma_y = sigma_x, rotation 0).
std::pair<Psf, BlurDraw> sample_blur_kernel(const GenericParams::Blur& params, RngStream& rng);

/// Same contract as fft_convolve, mirror borders by default.
Image apply_kernel(const Image& image, const Psf& kernel, BorderMode mode = BorderMode::Reflect);

/// Output dims round(dim * scale). Throws DegenerateOutput when a side would be 0.
Image resize(const Image& image, double scale, ResizeFilter filter);
Image resize_to(const Image& image, int height, int width, ResizeFilter filter);

Image add_gaussian_noise(const Image& image, double sigma, RngStream& rng);

/// Counts model: v -> Poisson(v * L) / L with L = 255 / scale.
Image add_poisson_noise(const Image& image, double scale, RngStream& rng);

/// Encode then decode with the pinned JPEG codec. quality in [30, 100].
Image jpeg_roundtrip(const Image& image, int quality);

/// Blur, resize, noise, JPEG in that order, each skippable.
Image apply_generic(const Image& image, const GenericParams& params, RngStream& rng, GenericDraws& draws);

}  // namespace hmbsynth
