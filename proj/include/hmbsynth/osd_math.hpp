// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hmbsynth/image.hpp"

namespace hmbsynth::osd {

/// Shape-agnostic dense tensor for elementwise latent algebra.
class LatentTensor {
public:
    LatentTensor() = default;
    LatentTensor(std::vector<std::size_t> shape, double fill = 0.0);
    LatentTensor(std::vector<std::size_t> shape, std::vector<double> values);

    const std::vector<std::size_t>& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    bool operator==(const LatentTensor&) const = default;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> values_;
};

/// Betas and their cumulative retention products alpha_bar_t = prod_{s<=t} (1 - beta_s).
class NoiseSchedule {
public:
    /// Betas must lie in [0, 1); with all betas positive alpha_bar is strictly decreasing.
    explicit NoiseSchedule(std::vector<double> betas);

    /// Linear betas from beta_start to beta_end over num_steps entries.
    static NoiseSchedule linear(std::size_t num_steps, double beta_start, double beta_end);
    /// Linear in sqrt(beta), the latent-diffusion default (0.00085 .. 0.012 over 1000 steps).
    static NoiseSchedule scaled_linear(std::size_t num_steps = 1000, double beta_start = 0.00085,
                                       double beta_end = 0.012);

    std::size_t length() const noexcept { return betas_.size(); }
    const std::vector<double>& betas() const noexcept { return betas_; }
    const std::vector<double>& alpha_bars() const noexcept { return alpha_bars_; }

private:
    std::vector<double> betas_;
    std::vector<double> alpha_bars_;
};

struct CfgParams {
    double lambda_cfg = 3.5;
    double eta = 0.0;
};

inline constexpr double kDefaultLambdaCfg = 3.5;
inline constexpr double kDefaultDiceWeight = 2e-2;

/// alpha_bar at 1-based timestep t; t == 0 is the clean terminal state (1.0).
/// Throws IndexOutOfRange past the schedule length.
double alpha_bar(const NoiseSchedule& schedule, std::size_t t);

/// z_t = sqrt(a) z + sqrt(1 - a) eps
LatentTensor forward_noise(const LatentTensor& z, const LatentTensor& eps, double a_bar);

/// DDIM stochasticity for a step from alpha_bar a_t to a_prev (a_t <= a_prev).
double sigma_from_alpha_bars(double a_t, double a_prev, double eta);
double sigma_t(const NoiseSchedule& schedule, std::size_t t, std::size_t t_prev, double eta);

/// z_neg + lambda (z_pos - z_neg)
LatentTensor cfg_combine(const LatentTensor& z_pos, const LatentTensor& z_neg, double lambda_cfg);

/// Clean latent estimate (z_t - sqrt(1 - a) z_eps) / sqrt(a).
LatentTensor one_step_latent(const LatentTensor& z_t, const LatentTensor& z_eps, double a_bar_t);

/// One DDIM update between explicit alpha_bar values. fresh_noise is ignored
/// when sigma is zero and may then be empty.
LatentTensor ddim_step_from_alpha_bars(const LatentTensor& z_t, const LatentTensor& z_eps, double a_t, double a_prev,
                                       double eta, const LatentTensor& fresh_noise);
/// Schedule form; t_prev == 0 is the terminal clean step.
LatentTensor ddim_step(const LatentTensor& z_t, const LatentTensor& z_eps, const NoiseSchedule& schedule,
                       std::size_t t, std::size_t t_prev, double eta, const LatentTensor& fresh_noise);

/// 1 - 2 sum(pred * target) / (sum(pred) + sum(target)); 0 when both are empty.
double dice_loss(const WeightMap& pred, const BinaryMask& target);
double dice_loss(std::span<const float> pred, std::span<const float> target);

double l1_loss(std::span<const float> a, std::span<const float> b);
double mse_loss(std::span<const float> a, std::span<const float> b);
double l1_loss(const Image& a, const Image& b);
double mse_loss(const Image& a, const Image& b);

/// l1_hq + l1_residual + alpha * dice. Throws NegativeTerm on negative input.
double dpg_total_loss(double l1_hq, double l1_residual, double dice, double alpha = kDefaultDiceWeight);

/// Assembles the three-branch objective from branch outputs and targets.
/// pred_residual is interleaved like the planar lq - hq difference (plane by plane).
double dpg_objective(const Image& pred_hq, std::span<const float> pred_residual, const WeightMap& pred_mask,
                     const Image& hq, const Image& lq, const BinaryMask& mask, double alpha = kDefaultDiceWeight);

/// Per-channel 3x3 Sobel gradient magnitude with mirror borders, scaled by
/// 1/(4 sqrt 2) into [0,1].
Image sobel_edges(const Image& image);

using ImageDistance = std::function<double(const Image&, const Image&)>;

/// d(a, b) + d(S(a), S(b)) with S the Sobel edge map.
double edge_aware_distance(const ImageDistance& distance, const Image& a, const Image& b);

}  // namespace hmbsynth::osd
