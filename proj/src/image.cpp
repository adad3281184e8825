// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "hmbsynth/image.hpp"

#include <algorithm>
#include <set>

#include "hmbsynth/error.hpp"

namespace hmbsynth {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::DecodeError: return "DecodeError";
        case ErrorCode::UnsupportedBitDepth: return "UnsupportedBitDepth";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::EmptyTrajectory: return "EmptyTrajectory";
        case ErrorCode::UnknownGroup: return "UnknownGroup";
        case ErrorCode::EmptyGroupMask: return "EmptyGroupMask";
        case ErrorCode::KernelTooLarge: return "KernelTooLarge";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::DegenerateOutput: return "DegenerateOutput";
        case ErrorCode::EncodeError: return "EncodeError";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::InvalidTimestepOrder: return "InvalidTimestepOrder";
        case ErrorCode::NegativeRadicand: return "NegativeRadicand";
        case ErrorCode::NegativeTerm: return "NegativeTerm";
        case ErrorCode::ZeroOriginal: return "ZeroOriginal";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

namespace {

void check_dims(int height, int width) {
    if (height < 1 || width < 1) {
        fail(ErrorCode::InvalidParams,
             "raster dimensions must be positive, got " + std::to_string(height) + "x" + std::to_string(width));
    }
}

}  // namespace

Field::Field(int height, int width, float fill) : height_(height), width_(width) {
    check_dims(height, width);
    data_.assign(static_cast<std::size_t>(height) * width, fill);
}

Image::Image(int height, int width, float fill) : height_(height), width_(width) {
    check_dims(height, width);
    data_.assign(static_cast<std::size_t>(height) * width * kChannels, fill);
}

Image Image::from_interleaved(int height, int width, std::span<const float> hwc) {
    Image img(height, width);
    if (hwc.size() != img.data_.size()) {
        fail(ErrorCode::ShapeMismatch, "interleaved buffer has " + std::to_string(hwc.size()) +
                                           " values, expected " + std::to_string(img.data_.size()));
    }
    const std::size_t n = img.plane_size();
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < kChannels; ++c) img.data_[c * n + i] = hwc[i * kChannels + c];
    }
    return img;
}

std::vector<float> Image::to_interleaved() const {
    const std::size_t n = plane_size();
    std::vector<float> out(n * kChannels);
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < kChannels; ++c) out[i * kChannels + c] = data_[c * n + i];
    }
    return out;
}

BinaryMask::BinaryMask(int height, int width, std::uint8_t fill) : height_(height), width_(width) {
    check_dims(height, width);
    data_.assign(static_cast<std::size_t>(height) * width, fill ? 1 : 0);
}

std::size_t BinaryMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

std::string to_string(PartGroup group) {
    switch (group) {
        case PartGroup::Head: return "head";
        case PartGroup::LeftUpperLimb: return "left_upper_limb";
        case PartGroup::RightUpperLimb: return "right_upper_limb";
        case PartGroup::LeftLowerLimb: return "left_lower_limb";
        case PartGroup::RightLowerLimb: return "right_lower_limb";
        case PartGroup::WholeBody: return "whole_body";
    }
    return "unknown";
}

PartGroup part_group_from_string(const std::string& name) {
    for (PartGroup g : kAllPartGroups) {
        if (to_string(g) == name) return g;
    }
    fail(ErrorCode::UnknownGroup, "unknown part group '" + name + "'");
}

PartLabelMap::PartLabelMap(int height, int width, std::vector<std::uint8_t> labels, LabelLegend legend)
    : height_(height), width_(width), labels_(std::move(labels)), legend_(std::move(legend)) {
    check_dims(height, width);
    if (labels_.size() != static_cast<std::size_t>(height) * width) {
        fail(ErrorCode::ShapeMismatch, "label buffer size does not match " + std::to_string(height) + "x" +
                                           std::to_string(width));
    }
    if (legend_.contains(0)) fail(ErrorCode::InvalidParams, "legend code 0 is reserved for background");
    std::set<int> seen(labels_.begin(), labels_.end());
    for (int code : seen) {
        if (code != 0 && !legend_.contains(code)) {
            fail(ErrorCode::InvalidParams, "label code " + std::to_string(code) + " missing from legend");
        }
    }
}

WeightMap PartLabelMap::indicator(PartGroup group) const {
    std::array<bool, 256> member{};
    for (const auto& [code, name] : legend_) {
        if (code < 1 || code > 255) continue;
        member[code] = group == PartGroup::WholeBody || name == to_string(group);
    }
    WeightMap out(height_, width_);
    auto dst = out.values();
    for (std::size_t i = 0; i < labels_.size(); ++i) dst[i] = member[labels_[i]] ? 1.0f : 0.0f;
    return out;
}

void validate_legend(const LabelLegend& legend) {
    for (PartGroup g : kAllPartGroups) {
        if (g == PartGroup::WholeBody) continue;
        const std::string name = to_string(g);
        const bool found = std::any_of(legend.begin(), legend.end(), [&](const auto& kv) { return kv.second == name; });
        if (!found) fail(ErrorCode::UnknownGroup, "legend does not name group '" + name + "'");
    }
    for (const auto& [code, name] : legend) {
        if (code < 1 || code > 255) {
            fail(ErrorCode::InvalidParams, "legend code " + std::to_string(code) + " outside 1..255");
        }
    }
}

LabelLegend default_legend() {
    return {
        {1, "head"},          {2, "torso"},          {3, "left_upper_limb"}, {4, "right_upper_limb"},
        {5, "left_lower_limb"}, {6, "right_lower_limb"},
    };
}

}  // namespace hmbsynth
