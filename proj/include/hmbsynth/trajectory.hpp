// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "hmbsynth/rng.hpp"

namespace hmbsynth {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point2&) const = default;
};

/// Markov motion model parameters. Lengths are in canvas pixels.
struct TrajectoryParams {
    int num_steps = 256;
    int canvas = 64;
    double max_step_length = 8.0;
    double inertia = 0.7;
    /// Standard deviation of the per-step velocity perturbation, as a
    /// fraction of max_step_length.
    double perturbation_sigma = 0.3;
    double big_shake_prob = 0.2;
    double centripetal_gain = 0.7;

    /// Throws Error(InvalidParams) on out-of-range fields.
    void validate() const;
};

struct Trajectory {
    std::vector<Point2> points;
};

/// Square kernel with odd side, nonnegative weights summing to 1.
struct Psf {
    int size = 0;
    std::vector<double> weights;  // row-major size x size

    double at(int row, int col) const { return weights[static_cast<std::size_t>(row) * size + col]; }
    double& at(int row, int col) { return weights[static_cast<std::size_t>(row) * size + col]; }
    int radius() const noexcept { return size / 2; }

    static Psf delta(int size);
};

/// Simulates a random trajectory starting at the canvas center.
///
/// Each step the velocity decays by `inertia`, receives an isotropic Gaussian
/// kick, a pull toward the canvas center and, with probability
/// `big_shake_prob`, a large impulse in a random direction. Speeds are capped
/// at `max_step_length`. The finished path is shifted so its mean sits at the
/// canvas center.
Trajectory simulate_trajectory(const TrajectoryParams& params, RngStream& rng);

/// Unnormalized bilinear splat of the first ceil(exposure * n) points into a
/// size x size grid whose center cell corresponds to the canvas center.
/// Out-of-grid contributions are clipped to the border cell.
std::vector<double> splat_trajectory(const Trajectory& traj, int canvas, int size, double exposure_fraction);

/// splat_trajectory normalized to unit mass.
Psf rasterize_psf(const Trajectory& traj, int canvas, int size, double exposure_fraction = 1.0);

}  // namespace hmbsynth
