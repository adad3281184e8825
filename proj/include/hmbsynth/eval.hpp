// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "hmbsynth/image.hpp"

namespace hmbsynth::eval {

/// Per-image detected HMB instance counts.
using CountTable = std::map<std::string, std::int64_t>;

struct DetectionCounts {
    CountTable original;
    CountTable restored;

    std::int64_t original_total() const;
    std::int64_t restored_total() const;
};

/// Reads JSONL lines of the form {"image": "<key>", "count": <n>}.
/// Throws ParseError citing the line number on malformed input.
CountTable read_counts(std::istream& in);
CountTable read_counts(const std::filesystem::path& path);

/// Pairs both tables; throws InvalidParams when keys differ or a count is negative.
DetectionCounts align_counts(CountTable original, CountTable restored);

/// restored_total / original_total. Throws ZeroOriginal when original_total is 0.
double hmb_ratio(std::int64_t restored_total, std::int64_t original_total);

/// Mean of per-image ratios over images with at least one original detection.
double hmb_ratio_per_image(const DetectionCounts& counts);

/// JSON report for the hmbr command.
nlohmann::json hmb_report(const DetectionCounts& counts);

/// 2|a & b| / (|a| + |b|); 1 when both are empty.
double mask_dice(const BinaryMask& a, const BinaryMask& b);
/// |a & b| / |a | b|; 1 when both are empty.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

/// 10 log10(1 / mse); +infinity for identical images.
double psnr(const Image& a, const Image& b);

/// Branch frequencies, parameter histograms and HMB coverage distribution
/// over a generated manifest. Header lines are skipped.
nlohmann::json manifest_stats(std::istream& in);
nlohmann::json manifest_stats(const std::filesystem::path& path);

}  // namespace hmbsynth::eval
