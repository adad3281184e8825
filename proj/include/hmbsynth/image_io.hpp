// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hmbsynth/image.hpp"

namespace hmbsynth {

struct ImageFormat {
    enum class Kind { LosslessRaster, Jpeg };
    Kind kind = Kind::LosslessRaster;
    int jpeg_quality = 95;

    static ImageFormat lossless() { return {}; }
    static ImageFormat jpeg(int quality) { return {Kind::Jpeg, quality}; }
};

/// Reads an 8- or 16-bit PNG or a baseline JPEG (detected by signature) and
/// scales samples to [0,1]. Gray rasters are replicated to three channels,
/// alpha is dropped.
Image load_image(const std::filesystem::path& path);
void save_image(const Image& image, const std::filesystem::path& path, ImageFormat format = ImageFormat::lossless());

/// Label raster: 8-bit single-channel PNG whose values are legend codes.
PartLabelMap load_label_map(const std::filesystem::path& path, const LabelLegend& legend);
void save_label_map(const PartLabelMap& labels, const std::filesystem::path& path);

/// Mask as 8-bit gray PNG with values {0, 255}.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);
BinaryMask load_mask(const std::filesystem::path& path);

/// Field as 8-bit (or 16-bit) gray PNG. With max_normalize the field is
/// divided by its maximum first; otherwise values are clamped to [0,1].
void save_field(const Field& field, const std::filesystem::path& path, bool sixteen_bit = false,
                bool max_normalize = false);

/// Intensity to 8-bit code, round half up.
std::uint8_t quantize_u8(float value) noexcept;

/// In-memory JPEG codec with pinned settings: ISLOW DCT, 4:2:0 chroma below
/// quality 90 and 4:4:4 at or above it.
std::vector<std::uint8_t> encode_jpeg(const Image& image, int quality);
Image decode_jpeg(std::span<const std::uint8_t> bytes);

}  // namespace hmbsynth
