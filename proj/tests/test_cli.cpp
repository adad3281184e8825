// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

// Drives the hmbsynth executable end to end and checks exit codes and output.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hmbsynth/config.hpp"
#include "hmbsynth/image_io.hpp"
#include "hmbsynth/pipeline.hpp"
#include "hmbsynth/version.hpp"
#include "test_util.hpp"

using namespace hmbsynth;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run(const fs::path& dir, const std::string& args) {
    const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string cmd = std::string("'") + HMBSYNTH_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" +
                            err.string() + "'";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& extra) {
    std::ofstream(dir / name) << "seed = 5\noutput_size = 32\n" << extra;
    return dir / name;
}

void write_pair(const fs::path& dir, const std::string& stem, int side) {
    save_image(test::smooth_image(side, side), dir / (stem + "_hq.png"));
    save_label_map(test::figure_labels(side, side), dir / (stem + "_labels.png"));
}

}  // namespace

TEST_CASE("version and help") {
    const fs::path dir = test::scratch_dir("cli_version");
    const auto r = run(dir, "--version");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find(kVersion) != std::string::npos);
    CHECK(run(dir, "").exit_code != 0);
}

TEST_CASE("validate-config and default-config") {
    const fs::path dir = test::scratch_dir("cli_validate");
    const auto def = run(dir, "default-config");
    REQUIRE(def.exit_code == 0);
    std::ofstream(dir / "default.toml") << def.out;
    CHECK(run(dir, "validate-config " + q(dir / "default.toml")).exit_code == 0);

    const auto bad = write_config(dir, "bad.toml", "[branch_probs]\nnone = 0.1\nhmb = 0.4\ngeneric = 0.4\n");
    const auto r = run(dir, "validate-config " + q(bad));
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("branch_probs") != std::string::npos);
    CHECK(r.err.find("bad.toml:3") != std::string::npos);

    const auto warn = write_config(dir, "warn.toml", "mystery = 1\n");
    const auto w = run(dir, "validate-config " + q(warn));
    CHECK(w.exit_code == 0);
    CHECK(w.err.find("warning") != std::string::npos);
    CHECK(w.err.find("mystery") != std::string::npos);

    CHECK(run(dir, "validate-config " + q(dir / "absent.toml")).exit_code == 2);
}

TEST_CASE("generate, stats and exit codes") {
    const fs::path dir = test::scratch_dir("cli_generate");
    write_pair(dir, "a", 32);
    write_pair(dir, "b", 40);
    std::ofstream(dir / "inputs.jsonl") << "{\"hq\": \"a_hq.png\", \"labels\": \"a_labels.png\"}\n"
                                        << "{\"hq\": \"b_hq.png\", \"labels\": \"b_labels.png\"}\n";
    const auto cfg = write_config(dir, "cfg.toml", "[trajectory]\npsf_size = 15\n");

    const auto r = run(dir, "generate --config " + q(cfg) + " --input " + q(dir / "inputs.jsonl") + " --out " +
                                q(dir / "out") + " --jobs 2");
    CHECK(r.exit_code == 0);
    const auto summary = nlohmann::json::parse(r.out);
    CHECK(summary["succeeded"] == 2);
    CHECK(summary["failed"] == 0);
    CHECK(fs::exists(dir / "out" / "lq" / "000001.png"));
    CHECK(load_image(dir / "out" / "lq" / "000001.png").height() == 32);

    const auto st = run(dir, "stats --manifest " + q(dir / "out" / "manifest.jsonl"));
    CHECK(st.exit_code == 0);
    CHECK(nlohmann::json::parse(st.out)["records"] == 2);

    const auto lim = run(dir, "generate --config " + q(cfg) + " --input " + q(dir / "inputs.jsonl") + " --out " +
                                  q(dir / "out_lim") + " --limit 1");
    CHECK(lim.exit_code == 0);
    CHECK(nlohmann::json::parse(lim.out)["total"] == 1);

    std::ofstream(dir / "partial.jsonl") << "{\"hq\": \"a_hq.png\", \"labels\": \"a_labels.png\"}\n"
                                         << "{\"hq\": \"gone.png\", \"labels\": \"a_labels.png\"}\n";
    const auto partial = run(dir, "generate --config " + q(cfg) + " --input " + q(dir / "partial.jsonl") +
                                      " --out " + q(dir / "out_partial"));
    CHECK(partial.exit_code == 1);
    CHECK(nlohmann::json::parse(partial.out)["failed"] == 1);
    CHECK(partial.err.find("sample 1 failed") != std::string::npos);

    const auto badcfg = write_config(dir, "badcfg.toml", "[morph]\nbinarize_threshold = 2.0\n");
    const auto c = run(dir, "generate --config " + q(badcfg) + " --input " + q(dir / "inputs.jsonl") + " --out " +
                                q(dir / "out_bad"));
    CHECK(c.exit_code == 2);
    CHECK(c.err.find("morph.binarize_threshold") != std::string::npos);
}

TEST_CASE("preview dumps intermediates and matches in-memory generation") {
    const fs::path dir = test::scratch_dir("cli_preview");
    write_pair(dir, "p", 48);
    const auto cfg_path = write_config(dir, "cfg.toml", "[trajectory]\npsf_size = 21\n");
    const auto r = run(dir, "preview --config " + q(cfg_path) + " --hq " + q(dir / "p_hq.png") + " --labels " +
                                q(dir / "p_labels.png") + " --seed 77 --index 4 --force-hmb --out " +
                                q(dir / "out"));
    REQUIRE(r.exit_code == 0);
    for (const char* f : {"W_s.png", "P.png", "I_B.png", "I_HMB.png", "M_HMB.png", "psf.png", "lq.png", "hq.png",
                          "mask.png", "record.json"}) {
        CAPTURE(f);
        CHECK(fs::exists(dir / "out" / f));
    }
    const Image psf = load_image(dir / "out" / "psf.png");
    CHECK(psf.height() == 21);
    float peak = 0.0f;
    for (float v : psf.values()) peak = std::max(peak, v);
    CHECK(peak == 1.0f);

    PipelineConfig cfg = load_config(cfg_path);
    cfg.root_seed = 77;
    cfg.branch_probs = {0.0, 1.0, 0.0};
    const SampleOutput s = degrade_sample(load_image(dir / "p_hq.png"),
                                          load_label_map(dir / "p_labels.png", cfg.legend), cfg, 4);
    const Image lq = load_image(dir / "out" / "lq.png");
    for (std::size_t k = 0; k < lq.values().size(); ++k) {
        REQUIRE(lq.values()[k] == static_cast<float>(quantize_u8(s.lq.values()[k])) / 255.0f);
    }
    const auto rec = nlohmann::json::parse(slurp(dir / "out" / "record.json"));
    CHECK(rec["first_order_branch"] == "hmb");
    CHECK(rec["root_seed"] == 77);
}

TEST_CASE("hmbr report") {
    const fs::path dir = test::scratch_dir("cli_hmbr");
    {
        std::ofstream o(dir / "orig.jsonl"), r(dir / "rest.jsonl");
        // 1765 originals and 164 survivors spread over five images.
        const int orig[] = {400, 365, 300, 350, 350};
        const int rest[] = {40, 30, 24, 40, 30};
        for (int i = 0; i < 5; ++i) {
            o << "{\"image\": \"img" << i << "\", \"count\": " << orig[i] << "}\n";
            r << "{\"image\": \"img" << i << "\", \"count\": " << rest[i] << "}\n";
        }
    }
    const auto r = run(dir, "hmbr --original " + q(dir / "orig.jsonl") + " --restored " + q(dir / "rest.jsonl"));
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["original_total"] == 1765);
    CHECK(j["restored_total"] == 164);
    CHECK(std::fabs(j["hmb_r"].get<double>() - 0.0929) <= 1e-4);

    std::ofstream(dir / "zero.jsonl") << "{\"image\": \"img0\", \"count\": 0}\n";
    std::ofstream(dir / "zero_r.jsonl") << "{\"image\": \"img0\", \"count\": 0}\n";
    CHECK(run(dir, "hmbr --original " + q(dir / "zero.jsonl") + " --restored " + q(dir / "zero_r.jsonl")).exit_code ==
          1);
}
