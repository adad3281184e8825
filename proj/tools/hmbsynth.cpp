// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: batch generation, single-sample preview, config
// validation and manifest/metric reports.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hmbsynth/batch.hpp"
#include "hmbsynth/config.hpp"
#include "hmbsynth/error.hpp"
#include "hmbsynth/eval.hpp"
#include "hmbsynth/image_io.hpp"
#include "hmbsynth/pipeline.hpp"
#include "hmbsynth/simd.hpp"
#include "hmbsynth/version.hpp"

namespace fs = std::filesystem;
using namespace hmbsynth;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

void print_diagnostics(const std::vector<Diagnostic>& diags, const std::string& source) {
    for (const auto& d : diags) std::cerr << d.format(source) << '\n';
}

int cmd_generate(const fs::path& config, const fs::path& input, const fs::path& out, int jobs, long limit) {
    const PipelineConfig cfg = load_config(config);
    BatchOptions opt;
    opt.out_dir = out;
    opt.jobs = jobs;
    if (limit >= 0) opt.limit = static_cast<std::size_t>(limit);
    opt.log = &std::cerr;
    const BatchSummary summary = run_batch(input, cfg, opt);
    nlohmann::json report = summary.to_json();
    report["simd"] = std::string(simd::to_string(simd::active_level()));
    std::cout << report.dump(2) << '\n';
    return summary.failed > 0 ? kExitFailure : kExitOk;
}

int cmd_preview(const fs::path& config, const fs::path& hq_path, const fs::path& labels_path, std::uint64_t seed,
                std::uint64_t index, const fs::path& out, bool force_hmb) {
    PipelineConfig cfg = load_config(config);
    cfg.root_seed = seed;
    if (force_hmb) cfg.branch_probs = {0.0, 1.0, 0.0};
    const Image hq = load_image(hq_path);
    const PartLabelMap labels = load_label_map(labels_path, cfg.legend);
    SampleIntermediates inter;
    SampleOutput s = degrade_sample(hq, labels, cfg, index, &inter);

    fs::create_directories(out);
    save_image(s.hq, out / "hq.png");
    save_image(s.lq, out / "lq.png");
    save_mask(s.mask, out / "mask.png");
    if (s.record.hmb) {
        save_field(inter.weight_map, out / "W_s.png", true, false);
        save_field(inter.coverage, out / "P.png", true, false);
        save_image(inter.blurred, out / "I_B.png");
        save_image(inter.blended, out / "I_HMB.png");
        save_mask(inter.mask, out / "M_HMB.png");
        Field psf(inter.psf.size, inter.psf.size);
        for (std::size_t i = 0; i < inter.psf.weights.size(); ++i) {
            psf.values()[i] = static_cast<float>(inter.psf.weights[i]);
        }
        save_field(psf, out / "psf.png", true, true);
    } else {
        std::cerr << "note: sample took the '" << to_string(s.record.first_order_branch)
                  << "' branch; no motion-blur intermediates (use --force-hmb)\n";
    }
    s.record.hq_path = "hq.png";
    s.record.lq_path = "lq.png";
    s.record.mask_path = "mask.png";
    s.record.source_hq = hq_path.string();
    s.record.source_labels = labels_path.string();
    std::ofstream(out / "record.json") << to_json(s.record).dump(2) << '\n';
    std::cout << to_json(s.record).dump(2) << '\n';
    return kExitOk;
}

int cmd_validate(const fs::path& config) {
    const auto diags = validate_config(config);
    print_diagnostics(diags, config.string());
    if (has_errors(diags)) return kExitConfig;
    std::cout << config.string() << ": ok";
    if (!diags.empty()) std::cout << " (" << diags.size() << " warning" << (diags.size() == 1 ? "" : "s") << ")";
    std::cout << '\n';
    return kExitOk;
}

int cmd_stats(const fs::path& manifest) {
    std::cout << eval::manifest_stats(manifest).dump(2) << '\n';
    return kExitOk;
}

int cmd_hmbr(const fs::path& original, const fs::path& restored) {
    const auto counts = eval::align_counts(eval::read_counts(original), eval::read_counts(restored));
    std::cout << eval::hmb_report(counts).dump(2) << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Human motion blur degradation synthesis"};
    app.set_version_flag("--version", std::string("hmbsynth ") + kVersion);
    app.require_subcommand(1);

    fs::path config, input, out, hq, labels, manifest, original, restored;
    int jobs = 0;
    long limit = -1;
    std::uint64_t seed = 0, index = 0;
    bool force_hmb = false;

    auto* gen = app.add_subcommand("generate", "Generate LQ/HQ/mask triplets from an input manifest");
    gen->add_option("--config", config, "TOML configuration")->required()->check(CLI::ExistingFile);
    gen->add_option("--input", input, "JSONL manifest of {\"hq\", \"labels\"} pairs")->required();
    gen->add_option("--out", out, "Output directory")->required();
    gen->add_option("--jobs", jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    gen->add_option("--limit", limit, "Process only the first K samples")->check(CLI::NonNegativeNumber);

    auto* prev = app.add_subcommand("preview", "Run one sample and dump its intermediates");
    prev->add_option("--config", config, "TOML configuration")->required()->check(CLI::ExistingFile);
    prev->add_option("--hq", hq, "HQ image")->required()->check(CLI::ExistingFile);
    prev->add_option("--labels", labels, "Label map PNG")->required()->check(CLI::ExistingFile);
    prev->add_option("--seed", seed, "Root seed")->required();
    prev->add_option("--index", index, "Sample index");
    prev->add_option("--out", out, "Output directory")->required();
    prev->add_flag("--force-hmb", force_hmb, "Force the motion-blur branch");

    auto* val = app.add_subcommand("validate-config", "Check a configuration file");
    val->add_option("file", config, "TOML configuration")->required();

    auto* def = app.add_subcommand("default-config", "Print the built-in configuration as TOML");

    auto* stats = app.add_subcommand("stats", "Summarize a generated manifest");
    stats->add_option("--manifest", manifest, "manifest.jsonl")->required()->check(CLI::ExistingFile);

    auto* hmbr = app.add_subcommand("hmbr", "Ratio of detected motion-blur instances after restoration");
    hmbr->add_option("--original", original, "Counts JSONL for the original images")->required();
    hmbr->add_option("--restored", restored, "Counts JSONL for the restored images")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*gen) return cmd_generate(config, input, out, jobs, limit);
        if (*prev) return cmd_preview(config, hq, labels, seed, index, out, force_hmb);
        if (*val) return cmd_validate(config);
        if (*def) {
            std::cout << default_config_text();
            return kExitOk;
        }
        if (*stats) return cmd_stats(manifest);
        if (*hmbr) return cmd_hmbr(original, restored);
    } catch (const ConfigError& e) {
        print_diagnostics(e.diagnostics(), config.string());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}
