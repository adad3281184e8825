// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

// Each vector variant must agree with the scalar reference: bitwise for the
// elementwise kernels, to rounding for the double-accumulated reductions.

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "hmbsynth/simd.hpp"

using namespace hmbsynth;

namespace {

std::vector<const simd::Kernels*> vector_variants() {
    std::vector<const simd::Kernels*> out;
#if defined(__x86_64__) || defined(_M_X64)
    if (simd::supported(simd::Level::Avx2)) out.push_back(&simd::avx2_kernels());
#endif
    return out;
}

std::vector<float> random_floats(std::mt19937_64& gen, std::size_t n, float lo, float hi) {
    std::uniform_real_distribution<float> u(lo, hi);
    std::vector<float> v(n);
    for (float& x : v) x = u(gen);
    // Sprinkle exact edge values the clamps must handle.
    if (n > 3) {
        v[0] = 0.0f;
        v[1] = 1.0f;
        v[n / 2] = -0.0f;
    }
    return v;
}

bool bit_equal(const std::vector<float>& a, const std::vector<float>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

// Lengths straddling every vector-width remainder, and an unaligned offset.
constexpr std::size_t kLengths[] = {0, 1, 3, 7, 8, 9, 15, 16, 17, 31, 33, 64, 65, 127, 1000, 1031};

}  // namespace

TEST_CASE("dispatch") {
    CHECK(simd::supported(simd::Level::Scalar));
    CHECK(simd::kernels(simd::Level::Scalar).level == simd::Level::Scalar);
    const auto before = simd::active_level();
    simd::set_level(simd::Level::Scalar);
    CHECK(simd::kernels().level == simd::Level::Scalar);
    simd::set_level(before);
    CHECK(simd::active_level() == before);
}

TEST_CASE("elementwise kernels are bit-identical to scalar") {
    const auto& ref = simd::scalar_kernels();
    const auto variants = vector_variants();
    if (variants.empty()) MESSAGE("no vector variant on this host; only scalar exercised");
    std::mt19937_64 gen(99);
    for (const auto* k : variants) {
        for (std::size_t n : kLengths) {
            for (std::size_t off : {0, 1, 3}) {
                CAPTURE(n);
                CAPTURE(off);
                const auto x = random_floats(gen, n + off, -1.5f, 2.5f);
                const auto y0 = random_floats(gen, n + off, -1.5f, 2.5f);
                const auto w = random_floats(gen, n + off, 0.0f, 1.0f);
                const float a = std::uniform_real_distribution<float>(-2.0f, 2.0f)(gen);

                auto run = [&](const simd::Kernels& kk, auto op) {
                    std::vector<float> y = y0;
                    op(kk, y);
                    return y;
                };
                auto axpy = [&](const simd::Kernels& kk, std::vector<float>& y) { kk.axpy(a, x.data() + off, y.data() + off, n); };
                auto mn = [&](const simd::Kernels& kk, std::vector<float>& y) { kk.min_inplace(y.data() + off, x.data() + off, n); };
                auto mx = [&](const simd::Kernels& kk, std::vector<float>& y) { kk.max_inplace(y.data() + off, x.data() + off, n); };
                auto cl = [&](const simd::Kernels& kk, std::vector<float>& y) { kk.clamp01(y.data() + off, n); };
                auto bl = [&](const simd::Kernels& kk, std::vector<float>& y) {
                    kk.blend(x.data() + off, y0.data() + off, w.data() + off, y.data() + off, n);
                };
                CHECK(bit_equal(run(ref, axpy), run(*k, axpy)));
                CHECK(bit_equal(run(ref, mn), run(*k, mn)));
                CHECK(bit_equal(run(ref, mx), run(*k, mx)));
                CHECK(bit_equal(run(ref, cl), run(*k, cl)));
                CHECK(bit_equal(run(ref, bl), run(*k, bl)));

                // Sobel reads one guard column on either side.
                const auto up = random_floats(gen, n + 2, 0.0f, 1.0f);
                const auto mid = random_floats(gen, n + 2, 0.0f, 1.0f);
                const auto down = random_floats(gen, n + 2, 0.0f, 1.0f);
                std::vector<float> s_ref(n), s_vec(n);
                ref.sobel_row(up.data() + 1, mid.data() + 1, down.data() + 1, s_ref.data(), n, 0.25f);
                k->sobel_row(up.data() + 1, mid.data() + 1, down.data() + 1, s_vec.data(), n, 0.25f);
                CHECK(bit_equal(s_ref, s_vec));
            }
        }
    }
}

TEST_CASE("complex product is bit-identical to scalar") {
    const auto& ref = simd::scalar_kernels();
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (const auto* k : vector_variants()) {
        for (std::size_t n : kLengths) {
            std::vector<double> a(2 * n), b(2 * n), o_ref(2 * n), o_vec(2 * n);
            for (auto& v : a) v = u(gen);
            for (auto& v : b) v = u(gen);
            ref.complex_mul(a.data(), b.data(), o_ref.data(), n);
            k->complex_mul(a.data(), b.data(), o_vec.data(), n);
            CHECK(std::memcmp(o_ref.data(), o_vec.data(), o_ref.size() * sizeof(double)) == 0);
        }
    }
}

TEST_CASE("scalar complex product matches std::complex") {
    const double a[] = {1.5, -2.0, 0.25, 4.0};
    const double b[] = {-3.0, 0.5, 2.0, -1.0};
    double o[4];
    simd::scalar_kernels().complex_mul(a, b, o, 2);
    CHECK(o[0] == 1.5 * -3.0 - (-2.0) * 0.5);
    CHECK(o[1] == 1.5 * 0.5 + (-2.0) * -3.0);
    CHECK(o[2] == 0.25 * 2.0 - 4.0 * -1.0);
    CHECK(o[3] == 0.25 * -1.0 + 4.0 * 2.0);
}

TEST_CASE("reductions agree to rounding") {
    const auto& ref = simd::scalar_kernels();
    std::mt19937_64 gen(17);
    for (const auto* k : vector_variants()) {
        for (std::size_t n : kLengths) {
            const auto x = random_floats(gen, n, -1.0f, 1.0f);
            const auto y = random_floats(gen, n, -1.0f, 1.0f);
            const double tol = 1e-12 * static_cast<double>(n + 1);
            CHECK(k->sum(x.data(), n) == doctest::Approx(ref.sum(x.data(), n)).epsilon(tol));
            CHECK(k->dot(x.data(), y.data(), n) == doctest::Approx(ref.dot(x.data(), y.data(), n)).epsilon(tol));
            CHECK(k->sum_abs_diff(x.data(), y.data(), n) ==
                  doctest::Approx(ref.sum_abs_diff(x.data(), y.data(), n)).epsilon(tol));
            CHECK(k->sum_sq_diff(x.data(), y.data(), n) ==
                  doctest::Approx(ref.sum_sq_diff(x.data(), y.data(), n)).epsilon(tol));
        }
    }
}

TEST_CASE("scalar reductions against direct loops") {
    const float x[] = {0.5f, -1.0f, 2.0f};
    const float y[] = {1.0f, 1.0f, -1.0f};
    const auto& k = simd::scalar_kernels();
    CHECK(k.sum(x, 3) == 1.5);
    CHECK(k.dot(x, y, 3) == 0.5 - 1.0 - 2.0);
    CHECK(k.sum_abs_diff(x, y, 3) == 0.5 + 2.0 + 3.0);
    CHECK(k.sum_sq_diff(x, y, 3) == 0.25 + 4.0 + 9.0);
}
