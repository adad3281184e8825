// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "hmbsynth/config.hpp"
#include "hmbsynth/image.hpp"
#include "hmbsynth/record.hpp"
#include "hmbsynth/trajectory.hpp"

namespace hmbsynth {

struct SampleOutput {
    /// HQ resized to the output size, paired with lq.
    Image hq;
    Image lq;
    /// M_HMB at output size; all zeros unless the hmb branch ran.
    BinaryMask mask;
    SampleRecord record;
};

/// Working-resolution stages of the motion-blur branch, for inspection.
/// Left empty when another branch was taken.
struct SampleIntermediates {
    WeightMap coverage;  // P
    WeightMap weight_map;  // W_s = 1 - P
    Psf psf;
    Image blurred;  // I_B
    Image blended;  // I_HMB
    BinaryMask mask;
};

/// Generates one LQ sample from (I_H, labels) with the stream for
/// (cfg.root_seed, sample_index).
///
/// Order of draws: first-order branch; for hmb the part group, erosion and
/// dilation radii and blur sigma (redrawn once if the group mask is empty,
/// then falling back to the generic branch), the trajectory step length and
/// trajectory; for generic the first-order stages; then the second-order
/// stages, which always run. Throws ShapeMismatch if labels and image differ
/// in size and InvalidParams for inputs smaller than kMinPipelineSide.
SampleOutput degrade_sample(const Image& hq, const PartLabelMap& labels, const PipelineConfig& cfg,
                            std::uint64_t sample_index, SampleIntermediates* intermediates = nullptr);

}  // namespace hmbsynth
