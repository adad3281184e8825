// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hmbsynth/convolve.hpp"
#include "hmbsynth/error.hpp"
#include "hmbsynth/generic_degrade.hpp"
#include "hmbsynth/image.hpp"
#include "hmbsynth/trajectory.hpp"

namespace hmbsynth {

struct BranchProbs {
    double none = 0.2;
    double hmb = 0.4;
    double generic = 0.4;
};

struct IntRange {
    int lo = 0;
    int hi = 0;
};

struct TrajectoryConfig {
    /// max_step_length inside is replaced by a per-sample draw.
    TrajectoryParams base;
    Range max_step_length{2.0, 16.0};
    double exposure_fraction = 1.0;
    /// Kernel side; clipped per sample to the largest odd value fitting the image.
    int psf_size = 65;
};

struct MorphConfig {
    IntRange erode_radius{0, 2};
    IntRange dilate_radius{2, 8};
    Range gaussian_sigma{1.0, 6.0};
    double binarize_threshold = 0.5;
};

struct PipelineConfig {
    std::uint64_t root_seed = 0;
    BranchProbs branch_probs;
    /// Indexed like kAllPartGroups.
    std::array<double, kNumPartGroups> part_group_weights{1, 1, 1, 1, 1, 1};
    LabelLegend legend = default_legend();
    TrajectoryConfig trajectory;
    MorphConfig morph;
    BorderMode hmb_border = BorderMode::Circular;
    GenericParams first_order;
    GenericParams second_order;
    /// Square side of the written pairs; 0 keeps the HQ resolution.
    int output_size = 512;
    ResizeFilter final_filter = ResizeFilter::Bicubic;
    std::filesystem::path output_dir;

    /// Throws ConfigError listing every violated constraint.
    void validate() const;
};

struct Diagnostic {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    /// 1-based source line, 0 when unknown.
    int line = 0;
    std::string key;
    std::string message;

    std::string format(std::string_view source = {}) const;
};

/// Carries the structured diagnostics that made a configuration unusable.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

/// Structural and range validation of TOML text. Never throws on bad input.
std::vector<Diagnostic> validate_config_text(std::string_view text, std::string_view source = "config");
/// Adds a NotFound-style diagnostic when the file cannot be read.
std::vector<Diagnostic> validate_config(const std::filesystem::path& path);

/// Parses and validates; throws ConfigError when any error diagnostic exists.
PipelineConfig parse_config(std::string_view text, std::string_view source = "config");
PipelineConfig load_config(const std::filesystem::path& path);

/// TOML text reproducing the built-in defaults.
std::string default_config_text();

bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace hmbsynth
