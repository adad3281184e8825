// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "hmbsynth/image.hpp"

namespace hmbsynth {

struct MorphParams {
    int erode_radius = 1;
    int dilate_radius = 4;
    double gaussian_sigma = 3.0;
    double binarize_threshold = 0.5;

    void validate() const;
};

/// Grayscale erosion with a discrete disk {(dx,dy): dx^2 + dy^2 <= r^2}.
/// Neighbors outside the raster are ignored.
WeightMap erode(const WeightMap& mask, int radius);
/// Grayscale dilation, dual of erode.
WeightMap dilate(const WeightMap& mask, int radius);

/// Normalized sampled Gaussian with radius ceil(3 sigma).
std::vector<float> gaussian_kernel_1d(double sigma);

/// Separable Gaussian with mirror borders; clamps to [0,1]. sigma 0 is identity.
WeightMap gaussian_blur_map(const WeightMap& mask, double sigma);

/// Min-max scaling to [0,1]. A flat map becomes all ones if nonzero and stays
/// zero otherwise.
WeightMap normalize_minmax(const WeightMap& map);

/// Part coverage P = Norm(G(D(E(indicator)))) for one group. Throws
/// UnknownGroup if the legend lacks the group, EmptyGroupMask if the group has
/// no pixels or vanishes under erosion.
WeightMap part_coverage(const PartLabelMap& labels, PartGroup group, const MorphParams& morph);

/// W_s = 1 - P: 1 keeps the sharp image, 0 takes the blurred one.
WeightMap make_weight_map(const PartLabelMap& labels, PartGroup group, const MorphParams& morph);

/// 1 - map, elementwise.
WeightMap complement(const WeightMap& map);

/// I_HMB = W_s * sharp + (1 - W_s) * blurred, broadcast over channels.
Image blend(const Image& sharp, const Image& blurred, const WeightMap& weight);

/// 1 where coverage >= threshold.
BinaryMask binarize(const WeightMap& coverage, double threshold);

}  // namespace hmbsynth
