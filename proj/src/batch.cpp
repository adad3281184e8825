// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "hmbsynth/batch.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "hmbsynth/error.hpp"
#include "hmbsynth/image_io.hpp"
#include "hmbsynth/pipeline.hpp"

namespace hmbsynth {

namespace fs = std::filesystem;

namespace {

std::string sample_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06zu.png", index);
    return buf;
}

// Serializes manifest writes and releases lines strictly in index order.
class OrderedAppender {
public:
    explicit OrderedAppender(std::ostream& out) : out_(out) {}

    void put(std::size_t index, std::string line) {
        std::lock_guard lock(mu_);
        pending_.emplace(index, std::move(line));
        for (auto it = pending_.begin(); it != pending_.end() && it->first == next_; it = pending_.begin()) {
            out_ << it->second << '\n';
            pending_.erase(it);
            ++next_;
        }
    }

private:
    std::ostream& out_;
    std::mutex mu_;
    std::map<std::size_t, std::string> pending_;
    std::size_t next_ = 0;
};

}  // namespace

std::vector<BatchItem> read_input_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::NotFound, "cannot open input manifest '" + path.string() + "'");
    const fs::path base = path.parent_path();
    std::vector<BatchItem> items;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            items.push_back({base / j.at("hq").get<std::string>(), base / j.at("labels").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::ParseError, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return items;
}

nlohmann::json BatchSummary::to_json() const {
    nlohmann::json failures_json = nlohmann::json::array();
    for (const auto& [index, msg] : failures) failures_json.push_back({{"sample_index", index}, {"error", msg}});
    return {{"total", total},
            {"succeeded", succeeded},
            {"failed", failed},
            {"fallbacks", fallbacks},
            {"branch_counts", branch_counts},
            {"failures", failures_json},
            {"seconds", seconds},
            {"samples_per_second", seconds > 0.0 ? static_cast<double>(total) / seconds : 0.0}};
}

BatchSummary run_batch(const std::vector<BatchItem>& all_items, const PipelineConfig& cfg, const BatchOptions& opt) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = opt.limit ? std::min(*opt.limit, all_items.size()) : all_items.size();

    for (const char* sub : {"hq", "lq", "mask"}) {
        std::error_code ec;
        fs::create_directories(opt.out_dir / sub, ec);
        if (ec) fail(ErrorCode::IoError, "cannot create '" + (opt.out_dir / sub).string() + "': " + ec.message());
    }
    std::ofstream manifest(opt.out_dir / "manifest.jsonl", std::ios::binary | std::ios::trunc);
    if (!manifest) fail(ErrorCode::IoError, "cannot write '" + (opt.out_dir / "manifest.jsonl").string() + "'");
    manifest << manifest_header(opt.created.value_or(utc_timestamp())).dump() << '\n';

    OrderedAppender appender(manifest);
    std::vector<std::optional<SampleRecord>> records(n);
    std::vector<std::string> errors(n);

    auto process = [&](std::size_t i) {
        const BatchItem& item = all_items[i];
        try {
            const Image hq = load_image(item.hq);
            const PartLabelMap labels = load_label_map(item.labels, cfg.legend);
            SampleOutput s = degrade_sample(hq, labels, cfg, i);
            const std::string name = sample_name(i);
            s.record.source_hq = item.hq.string();
            s.record.source_labels = item.labels.string();
            s.record.hq_path = "hq/" + name;
            s.record.lq_path = "lq/" + name;
            s.record.mask_path = "mask/" + name;
            save_image(s.hq, opt.out_dir / s.record.hq_path);
            save_image(s.lq, opt.out_dir / s.record.lq_path);
            save_mask(s.mask, opt.out_dir / s.record.mask_path);
            appender.put(i, to_json(s.record).dump());
            records[i] = std::move(s.record);
        } catch (const std::exception& e) {
            errors[i] = e.what();
            const nlohmann::json line = {{"type", "failure"},
                                         {"sample_index", i},
                                         {"source_hq", item.hq.string()},
                                         {"source_labels", item.labels.string()},
                                         {"error", errors[i]}};
            appender.put(i, line.dump());
        }
    };

    const int jobs = opt.jobs > 0 ? opt.jobs : tbb::task_arena::automatic;
    // An explicit worker count is honored even above the core count; TBB
    // otherwise caps workers at the hardware concurrency.
    std::optional<tbb::global_control> parallelism;
    if (opt.jobs > 0) parallelism.emplace(tbb::global_control::max_allowed_parallelism, static_cast<std::size_t>(opt.jobs));
    tbb::task_arena arena(jobs);
    arena.execute([&] {
        tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n, 1), [&](const tbb::blocked_range<std::size_t>& r) {
            for (std::size_t i = r.begin(); i != r.end(); ++i) process(i);
        });
    });
    manifest.flush();
    if (!manifest) fail(ErrorCode::IoError, "failed writing manifest");

    BatchSummary summary;
    summary.total = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (records[i]) {
            ++summary.succeeded;
            ++summary.branch_counts[to_string(records[i]->first_order_branch)];
            if (records[i]->fallback) ++summary.fallbacks;
        } else {
            ++summary.failed;
            summary.failures.emplace_back(i, errors[i]);
            if (opt.log) *opt.log << "sample " << i << " failed: " << errors[i] << '\n';
        }
    }
    summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return summary;
}

BatchSummary run_batch(const fs::path& input_manifest, const PipelineConfig& cfg, const BatchOptions& options) {
    return run_batch(read_input_manifest(input_manifest), cfg, options);
}

}  // namespace hmbsynth
