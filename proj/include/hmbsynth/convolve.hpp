// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hmbsynth/image.hpp"
#include "hmbsynth/trajectory.hpp"

namespace hmbsynth {

enum class BorderMode {
    /// Wraparound: the literal frequency-domain product on the image grid.
    Circular,
    /// Mirror-pad by the kernel radius (edge pixel not repeated), convolve, crop.
    Reflect,
};

/// Index into [0, n) under mirror reflection without edge repetition.
int reflect_index(long i, int n) noexcept;

/// Per-channel convolution through FFTW real transforms. The kernel center is
/// placed at the origin with wraparound, so a delta kernel is the identity.
/// Output is clamped to [0,1]. Throws KernelTooLarge when the kernel side
/// exceeds min(H, W).
Image fft_convolve(const Image& image, const Psf& psf, BorderMode mode = BorderMode::Circular);

}  // namespace hmbsynth
