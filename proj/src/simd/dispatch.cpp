// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string>

#include "hmbsynth/error.hpp"
#include "hmbsynth/simd.hpp"

namespace hmbsynth::simd {

namespace {

#if defined(__x86_64__) || defined(_M_X64)
constexpr bool kX86 = true;
#else
constexpr bool kX86 = false;
#endif

const Kernels* initial_table() noexcept {
    const char* env = std::getenv("HMBSYNTH_SIMD");
    const std::string requested = env ? env : "";
    if (requested == "scalar") return &scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
    if (supported(Level::Avx2)) return &avx2_kernels();
#endif
    return &scalar_kernels();
}

std::atomic<const Kernels*>& active() noexcept {
    static std::atomic<const Kernels*> table{initial_table()};
    return table;
}

}  // namespace

std::string_view to_string(Level level) noexcept {
    switch (level) {
        case Level::Scalar: return "scalar";
        case Level::Avx2: return "avx2";
    }
    return "unknown";
}

bool supported(Level level) noexcept {
    switch (level) {
        case Level::Scalar: return true;
        case Level::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return kX86 && __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

const Kernels& kernels() noexcept {
    return *active().load(std::memory_order_acquire);
}

const Kernels& kernels(Level level) {
    if (!supported(level)) {
        fail(ErrorCode::InvalidParams, "SIMD level '" + std::string(to_string(level)) + "' not supported on this host");
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (level == Level::Avx2) return avx2_kernels();
#endif
    return scalar_kernels();
}

Level active_level() noexcept {
    return kernels().level;
}

void set_level(Level level) {
    active().store(&kernels(level), std::memory_order_release);
}

}  // namespace hmbsynth::simd
