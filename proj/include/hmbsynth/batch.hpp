// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hmbsynth/config.hpp"
#include "hmbsynth/record.hpp"

namespace hmbsynth {

/// One input pair. Paths are resolved against the input manifest directory.
struct BatchItem {
    std::filesystem::path hq;
    std::filesystem::path labels;
};

/// Reads JSONL lines of the form {"hq": ..., "labels": ...}. Blank lines are
/// skipped; malformed lines throw ParseError citing the line number.
std::vector<BatchItem> read_input_manifest(const std::filesystem::path& path);

struct BatchOptions {
    std::filesystem::path out_dir;
    /// Worker count; 0 lets the scheduler decide.
    int jobs = 0;
    std::optional<std::size_t> limit;
    /// Overrides the header timestamp, for reproducible fixtures.
    std::optional<std::string> created;
    /// Failure messages are echoed here when set.
    std::ostream* log = nullptr;
};

struct BatchSummary {
    std::size_t total = 0;
    std::size_t succeeded = 0;
    std::size_t failed = 0;
    std::size_t fallbacks = 0;
    std::map<std::string, std::size_t> branch_counts{{"none", 0}, {"hmb", 0}, {"generic", 0}};
    /// (sample_index, message) for each failure, in index order.
    std::vector<std::pair<std::size_t, std::string>> failures;
    double seconds = 0.0;

    nlohmann::json to_json() const;
};

/// Generates every item in parallel. Writes hq/, lq/ and mask/ PNGs named by
/// sample index plus manifest.jsonl under out_dir. Manifest lines are
/// appended in index order regardless of completion order, so output is
/// independent of the worker count. A failed sample gets a
/// {"type": "failure"} line and does not stop the run.
BatchSummary run_batch(const std::vector<BatchItem>& items, const PipelineConfig& cfg, const BatchOptions& options);
BatchSummary run_batch(const std::filesystem::path& input_manifest, const PipelineConfig& cfg,
                       const BatchOptions& options);

}  // namespace hmbsynth
