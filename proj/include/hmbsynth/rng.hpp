// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>

namespace hmbsynth {

/// Philox4x32 with 10 rounds. Returns the 128-bit block for (counter, key).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based random stream keyed by (root_seed, sample_index).
///
/// The root seed is the Philox key and the sample index occupies the upper
/// half of the counter, so every draw is a pure function of
/// (root_seed, sample_index, draw_counter). Streams are single-owner.
class RngStream {
public:
    RngStream(std::uint64_t root_seed, std::uint64_t sample_index) noexcept;

    std::uint64_t root_seed() const noexcept { return root_seed_; }
    std::uint64_t sample_index() const noexcept { return sample_index_; }
    /// Number of 64-bit words consumed so far.
    std::uint64_t draw_counter() const noexcept { return draw_counter_; }

    std::uint64_t next_u64() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept;
    /// Uniform integer on the closed range [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept;
    bool bernoulli(double p) noexcept;
    /// Standard normal via Box-Muller; the paired value is cached.
    double normal() noexcept;
    double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }
    /// Poisson variate. Inversion below mean 10, PTRS rejection above.
    std::int64_t poisson(double mean) noexcept;
    /// Index drawn with probability proportional to weights (nonnegative, positive sum).
    std::size_t categorical(std::span<const double> weights) noexcept;

private:
    void refill() noexcept;

    std::uint64_t root_seed_;
    std::uint64_t sample_index_;
    std::uint64_t draw_counter_ = 0;
    std::array<std::uint64_t, 2> block_{};
    std::optional<double> cached_normal_;
};

/// Stream for one sample of a run.
inline RngStream derive_stream(std::uint64_t root_seed, std::uint64_t sample_index) noexcept {
    return RngStream(root_seed, sample_index);
}

}  // namespace hmbsynth
