// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "hmbsynth/osd_math.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hmbsynth/convolve.hpp"
#include "hmbsynth/error.hpp"
#include "hmbsynth/simd.hpp"

namespace hmbsynth::osd {

namespace {

std::size_t shape_volume(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void require_same_shape(const LatentTensor& a, const LatentTensor& b, const char* op) {
    if (a.shape() != b.shape()) fail(ErrorCode::ShapeMismatch, std::string(op) + ": tensor shapes differ");
}

void require_alpha(double a, const char* what) {
    if (!(a > 0.0 && a <= 1.0)) fail(ErrorCode::InvalidParams, std::string(what) + " must lie in (0,1]");
}

void require_order(double a_t, double a_prev) {
    if (!(a_t > 0.0 && a_t <= a_prev && a_prev <= 1.0)) {
        fail(ErrorCode::InvalidTimestepOrder, "need 0 < alpha_bar_t <= alpha_bar_prev <= 1, got " +
                                                  std::to_string(a_t) + " and " + std::to_string(a_prev));
    }
}

void require_same_size(std::size_t a, std::size_t b, const char* op) {
    if (a != b) fail(ErrorCode::ShapeMismatch, std::string(op) + ": operand sizes differ");
}

}  // namespace

LatentTensor::LatentTensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), values_(shape_volume(shape_), fill) {}

LatentTensor::LatentTensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
    if (values_.size() != shape_volume(shape_)) fail(ErrorCode::ShapeMismatch, "value count does not match shape");
}

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : betas_(std::move(betas)) {
    if (betas_.empty()) fail(ErrorCode::InvalidParams, "schedule needs at least one beta");
    alpha_bars_.reserve(betas_.size());
    double acc = 1.0;
    for (double b : betas_) {
        if (!(b >= 0.0 && b < 1.0)) fail(ErrorCode::InvalidParams, "betas must lie in [0,1)");
        acc *= 1.0 - b;
        alpha_bars_.push_back(acc);
    }
}

NoiseSchedule NoiseSchedule::linear(std::size_t num_steps, double beta_start, double beta_end) {
    std::vector<double> betas(num_steps);
    for (std::size_t i = 0; i < num_steps; ++i) {
        const double f = num_steps > 1 ? static_cast<double>(i) / (num_steps - 1) : 0.0;
        betas[i] = beta_start + f * (beta_end - beta_start);
    }
    return NoiseSchedule(std::move(betas));
}

NoiseSchedule NoiseSchedule::scaled_linear(std::size_t num_steps, double beta_start, double beta_end) {
    std::vector<double> betas(num_steps);
    const double s0 = std::sqrt(beta_start);
    const double s1 = std::sqrt(beta_end);
    for (std::size_t i = 0; i < num_steps; ++i) {
        const double f = num_steps > 1 ? static_cast<double>(i) / (num_steps - 1) : 0.0;
        const double s = s0 + f * (s1 - s0);
        betas[i] = s * s;
    }
    return NoiseSchedule(std::move(betas));
}

double alpha_bar(const NoiseSchedule& schedule, std::size_t t) {
    if (t == 0) return 1.0;
    if (t > schedule.length()) {
        fail(ErrorCode::IndexOutOfRange,
             "timestep " + std::to_string(t) + " beyond schedule length " + std::to_string(schedule.length()));
    }
    return schedule.alpha_bars()[t - 1];
}

LatentTensor forward_noise(const LatentTensor& z, const LatentTensor& eps, double a_bar) {
    require_same_shape(z, eps, "forward_noise");
    require_alpha(a_bar, "a_bar");
    const double sa = std::sqrt(a_bar);
    const double sn = std::sqrt(1.0 - a_bar);
    LatentTensor out(z.shape());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = sa * z[i] + sn * eps[i];
    return out;
}

double sigma_from_alpha_bars(double a_t, double a_prev, double eta) {
    require_order(a_t, a_prev);
    if (!(eta >= 0.0)) fail(ErrorCode::InvalidParams, "eta must be >= 0");
    if (eta == 0.0 || a_prev == 1.0 || a_t == a_prev) return 0.0;
    const double var = eta * eta * (1.0 - a_prev) / (1.0 - a_t) * (1.0 - a_t / a_prev);
    return std::sqrt(std::max(0.0, var));
}

double sigma_t(const NoiseSchedule& schedule, std::size_t t, std::size_t t_prev, double eta) {
    if (t_prev >= t) fail(ErrorCode::InvalidTimestepOrder, "t_prev must precede t");
    return sigma_from_alpha_bars(alpha_bar(schedule, t), alpha_bar(schedule, t_prev), eta);
}

LatentTensor cfg_combine(const LatentTensor& z_pos, const LatentTensor& z_neg, double lambda_cfg) {
    require_same_shape(z_pos, z_neg, "cfg_combine");
    // Written as (1 - l) z_neg + l z_pos so l = 0 and l = 1 reproduce the inputs exactly.
    const double keep = 1.0 - lambda_cfg;
    LatentTensor out(z_pos.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = keep * z_neg[i] + lambda_cfg * z_pos[i];
    return out;
}

LatentTensor one_step_latent(const LatentTensor& z_t, const LatentTensor& z_eps, double a_bar_t) {
    require_same_shape(z_t, z_eps, "one_step_latent");
    require_alpha(a_bar_t, "a_bar_t");
    const double sa = std::sqrt(a_bar_t);
    const double sn = std::sqrt(1.0 - a_bar_t);
    LatentTensor out(z_t.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (z_t[i] - sn * z_eps[i]) / sa;
    return out;
}

LatentTensor ddim_step_from_alpha_bars(const LatentTensor& z_t, const LatentTensor& z_eps, double a_t, double a_prev,
                                       double eta, const LatentTensor& fresh_noise) {
    require_same_shape(z_t, z_eps, "ddim_step");
    const double sigma = sigma_from_alpha_bars(a_t, a_prev, eta);
    double radicand = 1.0 - a_prev - sigma * sigma;
    if (radicand < 0.0) {
        if (radicand > -1e-15) {
            radicand = 0.0;
        } else {
            fail(ErrorCode::NegativeRadicand, "1 - alpha_bar_prev - sigma^2 = " + std::to_string(radicand));
        }
    }
    const bool noisy = sigma != 0.0;
    if (noisy) require_same_shape(z_t, fresh_noise, "ddim_step noise");
    const LatentTensor z0 = one_step_latent(z_t, z_eps, a_t);
    const double s_prev = std::sqrt(a_prev);
    const double s_dir = std::sqrt(radicand);
    LatentTensor out(z_t.shape());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double v = s_prev * z0[i] + s_dir * z_eps[i];
        if (noisy) v += sigma * fresh_noise[i];
        out[i] = v;
    }
    return out;
}

LatentTensor ddim_step(const LatentTensor& z_t, const LatentTensor& z_eps, const NoiseSchedule& schedule,
                       std::size_t t, std::size_t t_prev, double eta, const LatentTensor& fresh_noise) {
    if (t_prev >= t) fail(ErrorCode::InvalidTimestepOrder, "t_prev must precede t");
    return ddim_step_from_alpha_bars(z_t, z_eps, alpha_bar(schedule, t), alpha_bar(schedule, t_prev), eta,
                                     fresh_noise);
}

double dice_loss(std::span<const float> pred, std::span<const float> target) {
    require_same_size(pred.size(), target.size(), "dice_loss");
    const auto& k = simd::kernels();
    const double inter = k.dot(pred.data(), target.data(), pred.size());
    const double denom = k.sum(pred.data(), pred.size()) + k.sum(target.data(), target.size());
    if (denom == 0.0) return 0.0;
    return std::clamp(1.0 - 2.0 * inter / denom, 0.0, 1.0);
}

double dice_loss(const WeightMap& pred, const BinaryMask& target) {
    if (pred.height() != target.height() || pred.width() != target.width()) {
        fail(ErrorCode::ShapeMismatch, "dice_loss: prediction and target differ in shape");
    }
    std::vector<float> t(target.size());
    std::transform(target.values().begin(), target.values().end(), t.begin(),
                   [](std::uint8_t v) { return v ? 1.0f : 0.0f; });
    return dice_loss(pred.values(), t);
}

double l1_loss(std::span<const float> a, std::span<const float> b) {
    require_same_size(a.size(), b.size(), "l1_loss");
    if (a.empty()) return 0.0;
    return simd::kernels().sum_abs_diff(a.data(), b.data(), a.size()) / static_cast<double>(a.size());
}

double mse_loss(std::span<const float> a, std::span<const float> b) {
    require_same_size(a.size(), b.size(), "mse_loss");
    if (a.empty()) return 0.0;
    return simd::kernels().sum_sq_diff(a.data(), b.data(), a.size()) / static_cast<double>(a.size());
}

double l1_loss(const Image& a, const Image& b) {
    if (!a.same_shape(b)) fail(ErrorCode::ShapeMismatch, "l1_loss: image shapes differ");
    return l1_loss(a.values(), b.values());
}

double mse_loss(const Image& a, const Image& b) {
    if (!a.same_shape(b)) fail(ErrorCode::ShapeMismatch, "mse_loss: image shapes differ");
    return mse_loss(a.values(), b.values());
}

double dpg_total_loss(double l1_hq, double l1_residual, double dice, double alpha) {
    if (l1_hq < 0.0 || l1_residual < 0.0 || dice < 0.0 || alpha < 0.0) {
        fail(ErrorCode::NegativeTerm, "loss terms and alpha must be nonnegative");
    }
    return l1_hq + l1_residual + alpha * dice;
}

double dpg_objective(const Image& pred_hq, std::span<const float> pred_residual, const WeightMap& pred_mask,
                     const Image& hq, const Image& lq, const BinaryMask& mask, double alpha) {
    if (!hq.same_shape(lq) || !hq.same_shape(pred_hq)) fail(ErrorCode::ShapeMismatch, "dpg_objective: image shapes");
    std::vector<float> residual(hq.values().size());
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = lq.values()[i] - hq.values()[i];
    return dpg_total_loss(l1_loss(pred_hq, hq), l1_loss(pred_residual, residual), dice_loss(pred_mask, mask), alpha);
}

Image sobel_edges(const Image& image) {
    const int h = image.height();
    const int w = image.width();
    const float scale = static_cast<float>(1.0 / (4.0 * std::sqrt(2.0)));
    const auto& k = simd::kernels();
    Image out(h, w);
    // Three mirror-padded rows, each with one guard column per side.
    std::vector<float> rows(3 * static_cast<std::size_t>(w + 2));
    auto fill = [&](std::span<const float> plane, int y, float* dst) {
        const float* src = plane.data() + static_cast<std::size_t>(reflect_index(y, h)) * w;
        dst[0] = src[reflect_index(-1, w)];
        std::copy(src, src + w, dst + 1);
        dst[w + 1] = src[reflect_index(w, w)];
    };
    for (int c = 0; c < Image::kChannels; ++c) {
        const auto plane = image.plane(c);
        auto dst = out.plane(c);
        for (int y = 0; y < h; ++y) {
            float* up = rows.data();
            float* mid = up + (w + 2);
            float* down = mid + (w + 2);
            fill(plane, y - 1, up);
            fill(plane, y, mid);
            fill(plane, y + 1, down);
            k.sobel_row(up + 1, mid + 1, down + 1, dst.data() + static_cast<std::size_t>(y) * w,
                        static_cast<std::size_t>(w), scale);
        }
        k.clamp01(dst.data(), dst.size());
    }
    return out;
}

double edge_aware_distance(const ImageDistance& distance, const Image& a, const Image& b) {
    return distance(a, b) + distance(sobel_edges(a), sobel_edges(b));
}

}  // namespace hmbsynth::osd
