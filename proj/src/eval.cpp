// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "hmbsynth/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "hmbsynth/error.hpp"
#include "hmbsynth/osd_math.hpp"

namespace hmbsynth::eval {

namespace {

using nlohmann::json;

std::int64_t total(const CountTable& t) {
    std::int64_t sum = 0;
    for (const auto& [key, n] : t) sum += n;
    return sum;
}

void require_same_shape(const BinaryMask& a, const BinaryMask& b, const char* op) {
    if (a.height() != b.height() || a.width() != b.width()) {
        fail(ErrorCode::ShapeMismatch, std::string(op) + ": mask shapes differ");
    }
}

std::pair<std::size_t, std::size_t> overlap_counts(const BinaryMask& a, const BinaryMask& b) {
    std::size_t inter = 0, uni = 0;
    const auto va = a.values();
    const auto vb = b.values();
    for (std::size_t i = 0; i < va.size(); ++i) {
        inter += (va[i] & vb[i]);
        uni += (va[i] | vb[i]);
    }
    return {inter, uni};
}

// Fixed-bin histogram over [lo, hi]; values outside land in the edge bins.
json histogram(const std::vector<double>& values, double lo, double hi, int bins) {
    std::vector<std::int64_t> counts(bins, 0);
    for (double v : values) {
        int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
        counts[std::clamp(b, 0, bins - 1)]++;
    }
    json out;
    out["lo"] = lo;
    out["hi"] = hi;
    out["counts"] = counts;
    out["n"] = values.size();
    if (!values.empty()) {
        out["min"] = *std::min_element(values.begin(), values.end());
        out["max"] = *std::max_element(values.begin(), values.end());
        double sum = 0.0;
        for (double v : values) sum += v;
        out["mean"] = sum / static_cast<double>(values.size());
    }
    return out;
}

}  // namespace

std::int64_t DetectionCounts::original_total() const { return total(original); }
std::int64_t DetectionCounts::restored_total() const { return total(restored); }

CountTable read_counts(std::istream& in) {
    CountTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            const std::string key = j.at("image").get<std::string>();
            const std::int64_t n = j.at("count").get<std::int64_t>();
            if (n < 0) fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": negative count");
            if (!table.emplace(key, n).second) {
                fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": duplicate image '" + key + "'");
            }
        } catch (const json::exception& e) {
            fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return table;
}

CountTable read_counts(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::NotFound, "cannot open '" + path.string() + "'");
    return read_counts(in);
}

DetectionCounts align_counts(CountTable original, CountTable restored) {
    for (const auto& [key, n] : original) {
        if (!restored.contains(key)) fail(ErrorCode::InvalidParams, "image '" + key + "' missing from restored counts");
    }
    for (const auto& [key, n] : restored) {
        if (!original.contains(key)) fail(ErrorCode::InvalidParams, "image '" + key + "' missing from original counts");
    }
    return {std::move(original), std::move(restored)};
}

double hmb_ratio(std::int64_t restored_total, std::int64_t original_total) {
    if (original_total <= 0) fail(ErrorCode::ZeroOriginal, "original detection total must be positive");
    if (restored_total < 0) fail(ErrorCode::InvalidParams, "restored detection total must be nonnegative");
    return static_cast<double>(restored_total) / static_cast<double>(original_total);
}

double hmb_ratio_per_image(const DetectionCounts& counts) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [key, orig] : counts.original) {
        if (orig <= 0) continue;
        sum += static_cast<double>(counts.restored.at(key)) / static_cast<double>(orig);
        ++n;
    }
    if (n == 0) fail(ErrorCode::ZeroOriginal, "no image has an original detection");
    return sum / static_cast<double>(n);
}

json hmb_report(const DetectionCounts& counts) {
    json out;
    out["images"] = counts.original.size();
    out["original_total"] = counts.original_total();
    out["restored_total"] = counts.restored_total();
    out["hmb_r"] = hmb_ratio(counts.restored_total(), counts.original_total());
    out["hmb_r_per_image_mean"] = hmb_ratio_per_image(counts);
    return out;
}

double mask_dice(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b, "mask_dice");
    const auto [inter, uni] = overlap_counts(a, b);
    const std::size_t mass = a.count() + b.count();
    if (mass == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(mass);
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b, "mask_iou");
    const auto [inter, uni] = overlap_counts(a, b);
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double psnr(const Image& a, const Image& b) {
    if (!a.same_shape(b)) fail(ErrorCode::ShapeMismatch, "psnr: image shapes differ");
    const double mse = osd::mse_loss(a, b);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

json manifest_stats(std::istream& in) {
    std::map<std::string, std::int64_t> branches;
    std::map<std::string, std::int64_t> groups;
    std::map<std::string, std::int64_t> filters;
    std::map<std::string, std::int64_t> noise_kinds;
    std::vector<double> coverage, step_length, blur_sigma, resize_scale, jpeg_quality, gaussian_sigma, poisson_scale;
    std::int64_t records = 0, fallbacks = 0;

    auto collect_generic = [&](const json& g) {
        if (g.is_null()) return;
        if (g.contains("blur") && !g["blur"].is_null()) {
            blur_sigma.push_back(g["blur"].at("sigma_x").get<double>());
        }
        if (g.contains("resize") && !g["resize"].is_null()) {
            resize_scale.push_back(g["resize"].at("scale").get<double>());
            filters[g["resize"].at("filter").get<std::string>()]++;
        }
        if (g.contains("noise") && !g["noise"].is_null()) {
            const auto kind = g["noise"].at("kind").get<std::string>();
            noise_kinds[kind]++;
            if (kind == "gaussian") gaussian_sigma.push_back(g["noise"].at("gaussian_sigma").get<double>());
            else poisson_scale.push_back(g["noise"].at("poisson_scale").get<double>());
        }
        if (g.contains("jpeg") && !g["jpeg"].is_null()) {
            jpeg_quality.push_back(g["jpeg"].at("quality").get<double>());
        }
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json rec = json::parse(line);
            if (rec.value("type", std::string("sample")) != "sample") continue;
            ++records;
            branches[rec.at("first_order_branch").get<std::string>()]++;
            if (rec.value("fallback", false)) ++fallbacks;
            if (rec.contains("selected_part_group") && !rec["selected_part_group"].is_null()) {
                groups[rec["selected_part_group"].get<std::string>()]++;
            }
            if (rec.contains("hmb_coverage")) coverage.push_back(rec["hmb_coverage"].get<double>());
            if (rec.contains("trajectory") && !rec["trajectory"].is_null()) {
                step_length.push_back(rec["trajectory"].at("max_step_length").get<double>());
            }
            if (rec.contains("first_order_generic")) collect_generic(rec["first_order_generic"]);
            if (rec.contains("second_order")) collect_generic(rec["second_order"]);
        } catch (const json::exception& e) {
            fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + e.what());
        }
    }

    json report = json::object();
    report["records"] = records;
    if (records == 0) return report;
    json freq = json::object();
    for (const auto& [name, n] : branches) freq[name] = static_cast<double>(n) / static_cast<double>(records);
    report["branch_counts"] = branches;
    report["branch_frequencies"] = freq;
    report["fallbacks"] = fallbacks;
    report["part_groups"] = groups;
    report["resize_filters"] = filters;
    report["noise_kinds"] = noise_kinds;
    report["histograms"] = {
        {"hmb_coverage", histogram(coverage, 0.0, 1.0, 10)},
        {"max_step_length", histogram(step_length, 0.0, 16.0, 8)},
        {"blur_sigma_x", histogram(blur_sigma, 0.0, 3.0, 6)},
        {"resize_scale", histogram(resize_scale, 0.25, 1.5, 5)},
        {"gaussian_sigma", histogram(gaussian_sigma, 0.0, 0.06, 6)},
        {"poisson_scale", histogram(poisson_scale, 0.0, 2.0, 4)},
        {"jpeg_quality", histogram(jpeg_quality, 30.0, 100.0, 7)},
    };
    return report;
}

json manifest_stats(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::NotFound, "cannot open '" + path.string() + "'");
    return manifest_stats(in);
}

}  // namespace hmbsynth::eval
