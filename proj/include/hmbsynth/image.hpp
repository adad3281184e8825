// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace hmbsynth {

/// Smallest side accepted for pipeline inputs.
inline constexpr int kMinPipelineSide = 16;

/// Single-channel float raster, row-major. Backs weight maps and coverage maps.
class Field {
public:
    Field() = default;
    Field(int height, int width, float fill = 0.0f);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    std::size_t size() const noexcept { return data_.size(); }

    float& at(int y, int x) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    float at(int y, int x) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    std::span<float> row(int y) { return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)}; }
    std::span<const float> row(int y) const { return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)}; }

    std::span<float> values() { return data_; }
    std::span<const float> values() const { return data_; }

    bool operator==(const Field&) const = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<float> data_;
};

/// W_s and related per-pixel weights in [0,1].
using WeightMap = Field;

/// Three-channel image with intensities in [0,1].
///
/// Storage is planar (one row-major plane per channel) so that per-channel
/// filters and FFTs run over contiguous memory. Interleaved HxWx3 views are
/// produced at the I/O boundary.
class Image {
public:
    static constexpr int kChannels = 3;

    Image() = default;
    Image(int height, int width, float fill = 0.0f);

    /// Builds from interleaved HxWx3 data.
    static Image from_interleaved(int height, int width, std::span<const float> hwc);
    std::vector<float> to_interleaved() const;

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    std::size_t plane_size() const noexcept { return static_cast<std::size_t>(height_) * width_; }

    std::span<float> plane(int c) { return {data_.data() + c * plane_size(), plane_size()}; }
    std::span<const float> plane(int c) const { return {data_.data() + c * plane_size(), plane_size()}; }

    float& at(int c, int y, int x) { return data_[c * plane_size() + static_cast<std::size_t>(y) * width_ + x]; }
    float at(int c, int y, int x) const { return data_[c * plane_size() + static_cast<std::size_t>(y) * width_ + x]; }

    std::span<float> values() { return data_; }
    std::span<const float> values() const { return data_; }

    bool same_shape(const Image& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_;
    }

    bool operator==(const Image&) const = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<float> data_;
};

/// Two-valued mask, stored as 0/1 bytes.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int height, int width, std::uint8_t fill = 0);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    std::size_t size() const noexcept { return data_.size(); }

    std::uint8_t& at(int y, int x) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    std::uint8_t at(int y, int x) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    std::span<std::uint8_t> values() { return data_; }
    std::span<const std::uint8_t> values() const { return data_; }

    std::size_t count() const noexcept;

    bool operator==(const BinaryMask&) const = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Body part groups a motion-blur sample can target.
enum class PartGroup {
    Head,
    LeftUpperLimb,
    RightUpperLimb,
    LeftLowerLimb,
    RightLowerLimb,
    WholeBody,
};

inline constexpr int kNumPartGroups = 6;
inline constexpr PartGroup kAllPartGroups[kNumPartGroups] = {
    PartGroup::Head,          PartGroup::LeftUpperLimb,  PartGroup::RightUpperLimb,
    PartGroup::LeftLowerLimb, PartGroup::RightLowerLimb, PartGroup::WholeBody,
};

std::string to_string(PartGroup group);
/// Throws Error(UnknownGroup) for names outside the six groups.
PartGroup part_group_from_string(const std::string& name);

/// Maps label codes to part names. Code 0 is background and never listed.
///
/// Names may be one of the five limb/head groups or any other body part name
/// (e.g. "torso"). The whole_body group is the union of every nonzero code.
using LabelLegend = std::map<int, std::string>;

class PartLabelMap {
public:
    PartLabelMap() = default;
    /// Throws InvalidParams if a nonzero label is missing from the legend.
    PartLabelMap(int height, int width, std::vector<std::uint8_t> labels, LabelLegend legend);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    std::span<const std::uint8_t> labels() const { return labels_; }
    const LabelLegend& legend() const { return legend_; }

    /// 1 where the pixel belongs to the group, 0 elsewhere.
    WeightMap indicator(PartGroup group) const;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<std::uint8_t> labels_;
    LabelLegend legend_;
};

/// Checks that the legend names each of head and the four limb groups.
void validate_legend(const LabelLegend& legend);
LabelLegend default_legend();

}  // namespace hmbsynth
