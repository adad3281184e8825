// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "hmbsynth/generic_degrade.hpp"
#include "hmbsynth/hmb.hpp"
#include "hmbsynth/image.hpp"
#include "hmbsynth/trajectory.hpp"

namespace hmbsynth {

enum class Branch { None, Hmb, Generic };

std::string to_string(Branch branch);
Branch branch_from_string(const std::string& name);

/// Draws made by the motion-blur branch.
struct HmbDraws {
    PartGroup group = PartGroup::WholeBody;
    /// 1, or 2 when the first group was empty and was redrawn.
    int group_attempts = 1;
    MorphParams morph;
    TrajectoryParams trajectory;
    double exposure_fraction = 1.0;
    int psf_size = 0;
    /// Fraction of pixels set in M_HMB at working resolution.
    double coverage = 0.0;
};

/// Provenance of one generated pair.
struct SampleRecord {
    std::uint64_t sample_index = 0;
    std::uint64_t root_seed = 0;
    Branch first_order_branch = Branch::None;
    /// The hmb branch was drawn but both group attempts had empty masks.
    bool fallback = false;
    std::string fallback_reason;
    std::optional<HmbDraws> hmb;
    std::optional<GenericDraws> first_order_generic;
    GenericDraws second_order;
    int input_height = 0;
    int input_width = 0;
    int output_height = 0;
    int output_width = 0;
    std::string source_hq;
    std::string source_labels;
    std::string hq_path;
    std::string lq_path;
    std::string mask_path;
};

/// One manifest line. Always carries "type": "sample".
nlohmann::json to_json(const SampleRecord& record);
nlohmann::json to_json(const GenericDraws& draws);

/// Value-space convention recorded in manifest headers.
inline constexpr const char* kIntensitySpace = "decoded-raster";

/// First manifest line: type, format version, intensity space and timestamp.
nlohmann::json manifest_header(const std::string& created_utc);

/// Current UTC time as ISO 8601.
std::string utc_timestamp();

}  // namespace hmbsynth
