// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "hmbsynth/pipeline.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "hmbsynth/convolve.hpp"
#include "hmbsynth/error.hpp"
#include "hmbsynth/generic_degrade.hpp"
#include "hmbsynth/hmb.hpp"
#include "hmbsynth/rng.hpp"

namespace hmbsynth {

namespace {

std::string shape(int h, int w) { return std::to_string(h) + "x" + std::to_string(w); }

WeightMap resize_field(const WeightMap& field, int height, int width) {
    if (field.height() == height && field.width() == width) return field;
    Image tmp(field.height(), field.width());
    for (int c = 0; c < Image::kChannels; ++c) std::ranges::copy(field.values(), tmp.plane(c).begin());
    const Image resized = resize_to(tmp, height, width, ResizeFilter::Bilinear);
    WeightMap out(height, width);
    std::ranges::copy(resized.plane(0), out.values().begin());
    return out;
}

struct HmbResult {
    Image blended;
    WeightMap coverage;
};

// Returns nullopt when both group attempts produced an empty mask.
std::optional<HmbResult> run_hmb(const Image& hq, const PartLabelMap& labels, const PipelineConfig& cfg,
                                 RngStream& rng, SampleRecord& rec, SampleIntermediates* inter) {
    HmbDraws draws;
    WeightMap coverage;
    bool found = false;
    for (int attempt = 1; attempt <= 2 && !found; ++attempt) {
        draws.group = kAllPartGroups[rng.categorical(cfg.part_group_weights)];
        draws.group_attempts = attempt;
        draws.morph.erode_radius = static_cast<int>(rng.uniform_int(cfg.morph.erode_radius.lo, cfg.morph.erode_radius.hi));
        draws.morph.dilate_radius =
            static_cast<int>(rng.uniform_int(cfg.morph.dilate_radius.lo, cfg.morph.dilate_radius.hi));
        draws.morph.gaussian_sigma = rng.uniform(cfg.morph.gaussian_sigma.lo, cfg.morph.gaussian_sigma.hi);
        draws.morph.binarize_threshold = cfg.morph.binarize_threshold;
        try {
            coverage = part_coverage(labels, draws.group, draws.morph);
            found = true;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::EmptyGroupMask) throw;
            rec.fallback_reason = e.what();
        }
    }
    if (!found) return std::nullopt;

    draws.trajectory = cfg.trajectory.base;
    draws.trajectory.max_step_length = rng.uniform(cfg.trajectory.max_step_length.lo, cfg.trajectory.max_step_length.hi);
    draws.exposure_fraction = cfg.trajectory.exposure_fraction;
    int fit = std::min(hq.height(), hq.width());
    if (fit % 2 == 0) --fit;
    draws.psf_size = std::min(cfg.trajectory.psf_size, fit);
    const Trajectory traj = simulate_trajectory(draws.trajectory, rng);
    Psf psf = rasterize_psf(traj, draws.trajectory.canvas, draws.psf_size, draws.exposure_fraction);

    Image blurred = fft_convolve(hq, psf, cfg.hmb_border);
    WeightMap weight = complement(coverage);
    Image blended = blend(hq, blurred, weight);
    BinaryMask mask = binarize(coverage, draws.morph.binarize_threshold);
    draws.coverage = static_cast<double>(mask.count()) / static_cast<double>(mask.size());
    rec.hmb = draws;

    if (inter) {
        inter->coverage = coverage;
        inter->weight_map = std::move(weight);
        inter->psf = std::move(psf);
        inter->blurred = std::move(blurred);
        inter->blended = blended;
        inter->mask = std::move(mask);
    }
    return HmbResult{std::move(blended), std::move(coverage)};
}

}  // namespace

SampleOutput degrade_sample(const Image& hq, const PartLabelMap& labels, const PipelineConfig& cfg,
                            std::uint64_t sample_index, SampleIntermediates* intermediates) {
    if (hq.height() != labels.height() || hq.width() != labels.width()) {
        fail(ErrorCode::ShapeMismatch, "image is " + shape(hq.height(), hq.width()) + " but labels are " +
                                           shape(labels.height(), labels.width()));
    }
    if (std::min(hq.height(), hq.width()) < kMinPipelineSide) {
        fail(ErrorCode::InvalidParams, "input " + shape(hq.height(), hq.width()) + " is smaller than " +
                                           std::to_string(kMinPipelineSide) + " px");
    }
    cfg.validate();

    RngStream rng = derive_stream(cfg.root_seed, sample_index);
    SampleOutput out;
    SampleRecord& rec = out.record;
    rec.sample_index = sample_index;
    rec.root_seed = cfg.root_seed;
    rec.input_height = hq.height();
    rec.input_width = hq.width();

    const double probs[3] = {cfg.branch_probs.none, cfg.branch_probs.hmb, cfg.branch_probs.generic};
    rec.first_order_branch = static_cast<Branch>(rng.categorical(probs));

    Image first;
    std::optional<WeightMap> coverage;
    if (rec.first_order_branch == Branch::Hmb) {
        if (auto hmb = run_hmb(hq, labels, cfg, rng, rec, intermediates)) {
            first = std::move(hmb->blended);
            coverage = std::move(hmb->coverage);
        } else {
            rec.fallback = true;
            rec.first_order_branch = Branch::Generic;
        }
    }
    if (rec.first_order_branch == Branch::Generic) {
        GenericDraws draws;
        first = apply_generic(hq, cfg.first_order, rng, draws);
        rec.first_order_generic = draws;
    } else if (rec.first_order_branch == Branch::None) {
        first = hq;
    }

    Image lq = apply_generic(first, cfg.second_order, rng, rec.second_order);

    const int oh = cfg.output_size > 0 ? cfg.output_size : hq.height();
    const int ow = cfg.output_size > 0 ? cfg.output_size : hq.width();
    out.lq = resize_to(lq, oh, ow, cfg.final_filter);
    out.hq = resize_to(hq, oh, ow, cfg.final_filter);
    if (coverage) {
        out.mask = binarize(resize_field(*coverage, oh, ow), cfg.morph.binarize_threshold);
    } else {
        out.mask = BinaryMask(oh, ow, 0);
    }
    rec.output_height = oh;
    rec.output_width = ow;
    return out;
}

}  // namespace hmbsynth
