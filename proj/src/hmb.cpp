// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "hmbsynth/hmb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hmbsynth/convolve.hpp"
#include "hmbsynth/error.hpp"
#include "hmbsynth/simd.hpp"

namespace hmbsynth {

namespace {

// Half-width of the disk row at vertical offset dy.
int disk_span(int radius, int dy) {
    int w = 0;
    while ((w + 1) * (w + 1) + dy * dy <= radius * radius) ++w;
    return w;
}

template <typename Reduce>
WeightMap morph(const WeightMap& src, int radius, float init, Reduce reduce) {
    if (radius < 0) fail(ErrorCode::InvalidParams, "morphology radius must be >= 0");
    if (radius == 0) return src;
    const int h = src.height();
    const int w = src.width();
    WeightMap out(h, w, init);
    for (int y = 0; y < h; ++y) {
        float* dst = out.row(y).data();
        for (int dy = -radius; dy <= radius; ++dy) {
            const int yy = y + dy;
            if (yy < 0 || yy >= h) continue;
            const float* srow = src.row(yy).data();
            const int span = disk_span(radius, dy);
            for (int s = -span; s <= span; ++s) {
                const int lo = std::max(0, -s);
                const int hi = std::min(w, w - s);
                if (hi > lo) reduce(dst + lo, srow + lo + s, static_cast<std::size_t>(hi - lo));
            }
        }
    }
    return out;
}

}  // namespace

void MorphParams::validate() const {
    if (erode_radius < 0 || dilate_radius < 0) fail(ErrorCode::InvalidParams, "morphology radii must be >= 0");
    if (!(gaussian_sigma >= 0.0) || !std::isfinite(gaussian_sigma)) {
        fail(ErrorCode::InvalidParams, "gaussian_sigma must be >= 0");
    }
    if (!(binarize_threshold > 0.0 && binarize_threshold < 1.0)) {
        fail(ErrorCode::InvalidParams, "binarize_threshold must lie in (0,1)");
    }
}

WeightMap erode(const WeightMap& mask, int radius) {
    const auto& k = simd::kernels();
    return morph(mask, radius, std::numeric_limits<float>::infinity(),
                 [&](float* y, const float* x, std::size_t n) { k.min_inplace(y, x, n); });
}

WeightMap dilate(const WeightMap& mask, int radius) {
    const auto& k = simd::kernels();
    return morph(mask, radius, -std::numeric_limits<float>::infinity(),
                 [&](float* y, const float* x, std::size_t n) { k.max_inplace(y, x, n); });
}

std::vector<float> gaussian_kernel_1d(double sigma) {
    if (!(sigma > 0.0)) return {1.0f};
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(2 * radius + 1);
    double total = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        taps[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        total += taps[i + radius];
    }
    std::vector<float> out(taps.size());
    for (std::size_t i = 0; i < taps.size(); ++i) out[i] = static_cast<float>(taps[i] / total);
    return out;
}

WeightMap gaussian_blur_map(const WeightMap& mask, double sigma) {
    if (!(sigma >= 0.0)) fail(ErrorCode::InvalidParams, "sigma must be >= 0");
    if (sigma == 0.0) return mask;
    const auto taps = gaussian_kernel_1d(sigma);
    const int r = static_cast<int>(taps.size() / 2);
    const int h = mask.height();
    const int w = mask.width();
    const auto& k = simd::kernels();

    WeightMap horiz(h, w);
    std::vector<float> padded(static_cast<std::size_t>(w) + 2 * r);
    for (int y = 0; y < h; ++y) {
        const auto src = mask.row(y);
        for (int x = -r; x < w + r; ++x) padded[x + r] = src[reflect_index(x, w)];
        float* dst = horiz.row(y).data();
        for (int j = 0; j <= 2 * r; ++j) k.axpy(taps[j], padded.data() + j, dst, static_cast<std::size_t>(w));
    }
    WeightMap out(h, w);
    for (int y = 0; y < h; ++y) {
        float* dst = out.row(y).data();
        for (int j = 0; j <= 2 * r; ++j) {
            k.axpy(taps[j], horiz.row(reflect_index(y + j - r, h)).data(), dst, static_cast<std::size_t>(w));
        }
    }
    k.clamp01(out.values().data(), out.size());
    return out;
}

WeightMap normalize_minmax(const WeightMap& map) {
    const auto [lo_it, hi_it] = std::minmax_element(map.values().begin(), map.values().end());
    const float lo = *lo_it;
    const float hi = *hi_it;
    WeightMap out(map.height(), map.width());
    if (hi == lo) {
        std::fill(out.values().begin(), out.values().end(), hi != 0.0f ? 1.0f : 0.0f);
        return out;
    }
    const double range = static_cast<double>(hi) - lo;
    auto dst = out.values();
    const auto src = map.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = static_cast<float>((static_cast<double>(src[i]) - lo) / range);
    }
    return out;
}

WeightMap part_coverage(const PartLabelMap& labels, PartGroup group, const MorphParams& morph_params) {
    morph_params.validate();
    if (group != PartGroup::WholeBody) {
        const std::string name = to_string(group);
        const auto& legend = labels.legend();
        const bool known =
            std::any_of(legend.begin(), legend.end(), [&](const auto& kv) { return kv.second == name; });
        if (!known) fail(ErrorCode::UnknownGroup, "legend has no entry for group '" + name + "'");
    }
    WeightMap m = labels.indicator(group);
    const auto is_empty = [](const WeightMap& f) {
        return std::all_of(f.values().begin(), f.values().end(), [](float v) { return v == 0.0f; });
    };
    if (is_empty(m)) fail(ErrorCode::EmptyGroupMask, "group '" + to_string(group) + "' has no pixels");
    m = erode(m, morph_params.erode_radius);
    if (is_empty(m)) fail(ErrorCode::EmptyGroupMask, "group '" + to_string(group) + "' vanished under erosion");
    m = dilate(m, morph_params.dilate_radius);
    m = gaussian_blur_map(m, morph_params.gaussian_sigma);
    return normalize_minmax(m);
}

WeightMap complement(const WeightMap& map) {
    WeightMap out(map.height(), map.width());
    auto dst = out.values();
    const auto src = map.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = 1.0f - src[i];
    return out;
}

WeightMap make_weight_map(const PartLabelMap& labels, PartGroup group, const MorphParams& morph_params) {
    return complement(part_coverage(labels, group, morph_params));
}

Image blend(const Image& sharp, const Image& blurred, const WeightMap& weight) {
    if (!sharp.same_shape(blurred) || weight.height() != sharp.height() || weight.width() != sharp.width()) {
        fail(ErrorCode::ShapeMismatch, "blend inputs disagree in shape");
    }
    Image out(sharp.height(), sharp.width());
    const auto& k = simd::kernels();
    for (int c = 0; c < Image::kChannels; ++c) {
        k.blend(sharp.plane(c).data(), blurred.plane(c).data(), weight.values().data(), out.plane(c).data(),
                out.plane_size());
    }
    return out;
}

BinaryMask binarize(const WeightMap& coverage, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) fail(ErrorCode::InvalidParams, "threshold must lie in (0,1)");
    BinaryMask out(coverage.height(), coverage.width());
    const auto src = coverage.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<double>(src[i]) >= threshold ? 1 : 0;
    return out;
}

}  // namespace hmbsynth
