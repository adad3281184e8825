// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "hmbsynth/record.hpp"

#include <chrono>
#include <ctime>

#include "hmbsynth/error.hpp"
#include "hmbsynth/version.hpp"

namespace hmbsynth {

std::string to_string(Branch branch) {
    switch (branch) {
        case Branch::None: return "none";
        case Branch::Hmb: return "hmb";
        case Branch::Generic: return "generic";
    }
    return "none";
}

Branch branch_from_string(const std::string& name) {
    if (name == "none") return Branch::None;
    if (name == "hmb") return Branch::Hmb;
    if (name == "generic") return Branch::Generic;
    fail(ErrorCode::InvalidParams, "unknown branch '" + name + "'");
}

nlohmann::json to_json(const GenericDraws& d) {
    using nlohmann::json;
    json out = json::object();
    out["blur"] = nullptr;
    out["resize"] = nullptr;
    out["noise"] = nullptr;
    out["jpeg"] = nullptr;
    if (d.blur) {
        out["blur"] = {{"kernel_size", d.blur->kernel_size},
                       {"sigma_x", d.blur->sigma_x},
                       {"sigma_y", d.blur->sigma_y},
                       {"rotation", d.blur->rotation},
                       {"isotropic", d.blur->isotropic}};
    }
    if (d.resize) {
        out["resize"] = {{"scale", d.resize->scale},
                         {"filter", to_string(d.resize->filter)},
                         {"height", d.resize->height},
                         {"width", d.resize->width}};
    }
    if (d.noise) {
        const bool gaussian = d.noise->kind == NoiseDraw::Kind::Gaussian;
        out["noise"] = {{"kind", gaussian ? "gaussian" : "poisson"}};
        if (gaussian) out["noise"]["gaussian_sigma"] = d.noise->gaussian_sigma;
        else out["noise"]["poisson_scale"] = d.noise->poisson_scale;
    }
    if (d.jpeg) out["jpeg"] = {{"quality", d.jpeg->quality}};
    return out;
}

nlohmann::json to_json(const SampleRecord& r) {
    using nlohmann::json;
    json out;
    out["type"] = "sample";
    out["sample_index"] = r.sample_index;
    out["root_seed"] = r.root_seed;
    out["first_order_branch"] = to_string(r.first_order_branch);
    out["fallback"] = r.fallback;
    if (r.fallback) out["fallback_reason"] = r.fallback_reason;
    out["selected_part_group"] = nullptr;
    out["trajectory"] = nullptr;
    out["morph"] = nullptr;
    if (r.hmb) {
        const auto& h = *r.hmb;
        out["selected_part_group"] = to_string(h.group);
        out["group_attempts"] = h.group_attempts;
        out["morph"] = {{"erode_radius", h.morph.erode_radius},
                        {"dilate_radius", h.morph.dilate_radius},
                        {"gaussian_sigma", h.morph.gaussian_sigma},
                        {"binarize_threshold", h.morph.binarize_threshold}};
        out["trajectory"] = {{"num_steps", h.trajectory.num_steps},
                             {"canvas", h.trajectory.canvas},
                             {"max_step_length", h.trajectory.max_step_length},
                             {"inertia", h.trajectory.inertia},
                             {"perturbation_sigma", h.trajectory.perturbation_sigma},
                             {"big_shake_prob", h.trajectory.big_shake_prob},
                             {"centripetal_gain", h.trajectory.centripetal_gain},
                             {"exposure_fraction", h.exposure_fraction},
                             {"psf_size", h.psf_size}};
        out["hmb_coverage"] = h.coverage;
    }
    out["first_order_generic"] = r.first_order_generic ? to_json(*r.first_order_generic) : json(nullptr);
    out["second_order"] = to_json(r.second_order);
    out["input_size"] = {r.input_height, r.input_width};
    out["output_size"] = {r.output_height, r.output_width};
    out["source_hq"] = r.source_hq;
    out["source_labels"] = r.source_labels;
    out["hq_path"] = r.hq_path;
    out["lq_path"] = r.lq_path;
    out["mask_path"] = r.mask_path;
    return out;
}

nlohmann::json manifest_header(const std::string& created_utc) {
    return {{"type", "header"},
            {"format", 1},
            {"version", kVersion},
            {"intensity_space", kIntensitySpace},
            {"created", created_utc}};
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace hmbsynth
