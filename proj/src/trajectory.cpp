// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "hmbsynth/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hmbsynth/error.hpp"

namespace hmbsynth {

void TrajectoryParams::validate() const {
    auto bad = [](const std::string& what) { fail(ErrorCode::InvalidParams, "trajectory: " + what); };
    if (num_steps < 2) bad("num_steps must be >= 2");
    if (canvas < 8) bad("canvas must be >= 8");
    if (!(max_step_length >= 0.0) || !std::isfinite(max_step_length)) bad("max_step_length must be >= 0");
    if (!(inertia >= 0.0 && inertia <= 1.0)) bad("inertia must lie in [0,1]");
    if (!(perturbation_sigma >= 0.0) || !std::isfinite(perturbation_sigma)) bad("perturbation_sigma must be >= 0");
    if (!(big_shake_prob >= 0.0 && big_shake_prob <= 1.0)) bad("big_shake_prob must lie in [0,1]");
    if (!(centripetal_gain >= 0.0) || !std::isfinite(centripetal_gain)) bad("centripetal_gain must be >= 0");
}

Psf Psf::delta(int size) {
    if (size < 1 || size % 2 == 0) fail(ErrorCode::InvalidParams, "kernel size must be odd and positive");
    Psf psf{size, std::vector<double>(static_cast<std::size_t>(size) * size, 0.0)};
    psf.at(size / 2, size / 2) = 1.0;
    return psf;
}

Trajectory simulate_trajectory(const TrajectoryParams& params, RngStream& rng) {
    params.validate();
    const double center = params.canvas / 2.0;
    const double max_len = params.max_step_length;
    const double kick = params.perturbation_sigma * max_len;

    Trajectory traj;
    traj.points.reserve(params.num_steps);
    Point2 p{center, center};
    const double theta0 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    Point2 v{max_len * std::cos(theta0), max_len * std::sin(theta0)};
    traj.points.push_back(p);

    for (int k = 1; k < params.num_steps; ++k) {
        Point2 next{params.inertia * v.x, params.inertia * v.y};
        const double nx = rng.normal();
        const double ny = rng.normal();
        next.x += kick * nx + params.centripetal_gain * (center - p.x);
        next.y += kick * ny + params.centripetal_gain * (center - p.y);
        const bool shake = rng.uniform() < params.big_shake_prob;
        const double shake_angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        if (shake) {
            next.x += 2.0 * max_len * std::cos(shake_angle);
            next.y += 2.0 * max_len * std::sin(shake_angle);
        }
        const double speed = std::hypot(next.x, next.y);
        if (speed > max_len) {
            const double s = speed > 0.0 ? max_len / speed : 0.0;
            next.x *= s;
            next.y *= s;
        }
        v = next;
        p.x += v.x;
        p.y += v.y;
        traj.points.push_back(p);
    }

    double mx = 0.0, my = 0.0;
    for (const auto& q : traj.points) {
        mx += q.x;
        my += q.y;
    }
    mx /= static_cast<double>(traj.points.size());
    my /= static_cast<double>(traj.points.size());
    for (auto& q : traj.points) {
        q.x += center - mx;
        q.y += center - my;
    }
    return traj;
}

std::vector<double> splat_trajectory(const Trajectory& traj, int canvas, int size, double exposure_fraction) {
    if (size < 3 || size % 2 == 0) fail(ErrorCode::InvalidParams, "PSF size must be odd and >= 3");
    if (!(exposure_fraction > 0.0 && exposure_fraction <= 1.0)) {
        fail(ErrorCode::InvalidParams, "exposure_fraction must lie in (0,1]");
    }
    if (traj.points.empty()) fail(ErrorCode::EmptyTrajectory, "trajectory has no points");
    const auto n = static_cast<std::size_t>(
        std::ceil(exposure_fraction * static_cast<double>(traj.points.size()) - 1e-12));
    const std::size_t used = std::clamp<std::size_t>(n, 1, traj.points.size());

    std::vector<double> grid(static_cast<std::size_t>(size) * size, 0.0);
    const double offset = (size - 1) / 2.0 - canvas / 2.0;
    auto deposit = [&](long row, long col, double w) {
        if (w == 0.0) return;
        row = std::clamp<long>(row, 0, size - 1);
        col = std::clamp<long>(col, 0, size - 1);
        grid[static_cast<std::size_t>(row) * size + col] += w;
    };
    for (std::size_t i = 0; i < used; ++i) {
        const Point2& q = traj.points[i];
        if (!std::isfinite(q.x) || !std::isfinite(q.y)) fail(ErrorCode::InvalidParams, "non-finite trajectory point");
        const double u = q.x + offset;
        const double v = q.y + offset;
        const double u0 = std::floor(u);
        const double v0 = std::floor(v);
        const double fu = u - u0;
        const double fv = v - v0;
        const long c0 = static_cast<long>(u0);
        const long r0 = static_cast<long>(v0);
        deposit(r0, c0, (1.0 - fu) * (1.0 - fv));
        deposit(r0, c0 + 1, fu * (1.0 - fv));
        deposit(r0 + 1, c0, (1.0 - fu) * fv);
        deposit(r0 + 1, c0 + 1, fu * fv);
    }
    return grid;
}

Psf rasterize_psf(const Trajectory& traj, int canvas, int size, double exposure_fraction) {
    Psf psf{size, splat_trajectory(traj, canvas, size, exposure_fraction)};
    double total = 0.0;
    for (double w : psf.weights) total += w;
    for (double& w : psf.weights) w /= total;
    return psf;
}

}  // namespace hmbsynth
