// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "hmbsynth/error.hpp"
#include "hmbsynth/eval.hpp"
#include "hmbsynth/generic_degrade.hpp"
#include "hmbsynth/rng.hpp"
#include "test_util.hpp"

using namespace hmbsynth;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an hmbsynth::Error");
    return ErrorCode::IoError;
}

bool in_unit_range(const Image& img) {
    for (float v : img.values())
        if (!(v >= 0.0f && v <= 1.0f)) return false;
    return true;
}

double mean_abs_error(const Image& a, const Image& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) s += std::fabs(a.values()[i] - b.values()[i]);
    return s / static_cast<double>(a.values().size());
}

}  // namespace

TEST_CASE("anisotropic gaussian kernel") {
    const Psf iso = anisotropic_gaussian_kernel(15, 1.7, 1.7, 0.9);
    for (int r = 0; r < 15; ++r)
        for (int c = 0; c < 15; ++c) CHECK(std::fabs(iso.at(r, c) - iso.at(c, 14 - r)) < 1e-9);

    const Psf aniso = anisotropic_gaussian_kernel(21, 3.0, 0.2, 0.0);
    double mx = 0.0, my = 0.0;
    for (int r = 0; r < 21; ++r) {
        for (int c = 0; c < 21; ++c) {
            mx += aniso.at(r, c) * (c - 10) * (c - 10);
            my += aniso.at(r, c) * (r - 10) * (r - 10);
        }
    }
    CHECK(mx > my);

    // Rotating by pi/2 swaps the axes.
    const Psf rot = anisotropic_gaussian_kernel(21, 3.0, 0.2, std::numbers::pi / 2);
    for (int r = 0; r < 21; ++r)
        for (int c = 0; c < 21; ++c) CHECK(rot.at(r, c) == doctest::Approx(aniso.at(c, r)).epsilon(1e-9));
}

TEST_CASE("sampled blur kernels are normalized and within range") {
    GenericParams::Blur p;
    RngStream rng(5, 5);
    int iso = 0;
    for (int i = 0; i < 300; ++i) {
        const auto [k, d] = sample_blur_kernel(p, rng);
        CHECK(k.size == d.kernel_size);
        CHECK(d.kernel_size % 2 == 1);
        CHECK(d.kernel_size >= 7);
        CHECK(d.kernel_size <= 21);
        CHECK(d.sigma_x >= 0.2);
        CHECK(d.sigma_x <= 3.0);
        iso += d.isotropic;
        if (d.isotropic) CHECK(d.sigma_y == d.sigma_x);
        CHECK(std::fabs(std::accumulate(k.weights.begin(), k.weights.end(), 0.0) - 1.0) <= 1e-9);
        for (double w : k.weights) REQUIRE(w >= 0.0);
    }
    CHECK(iso > 100);
    CHECK(iso < 200);
}

TEST_CASE("apply_kernel identity and DC gain") {
    std::mt19937_64 gen(6);
    const Image img = test::random_image(gen, 24, 30);
    CHECK(test::max_abs_diff(apply_kernel(img, Psf::delta(9)), img) < 1e-6);
    const Image flat(24, 30, 0.37f);
    const Image out = apply_kernel(flat, anisotropic_gaussian_kernel(13, 2.0, 0.7, 0.4));
    for (float v : out.values()) CHECK(v == doctest::Approx(0.37f).epsilon(1e-6));
}

TEST_CASE("resize basics") {
    std::mt19937_64 gen(7);
    const Image img = test::random_image(gen, 20, 27);
    const Image same = resize(img, 1.0, ResizeFilter::Bilinear);
    CHECK(same.height() == 20);
    CHECK(test::max_abs_diff(same, img) < 1e-6);

    const Image r = resize(img, 0.37, ResizeFilter::Bicubic);
    CHECK(r.height() == static_cast<int>(std::lround(20 * 0.37)));
    CHECK(r.width() == static_cast<int>(std::lround(27 * 0.37)));
    CHECK(in_unit_range(r));

    for (auto f : {ResizeFilter::Area, ResizeFilter::Bilinear, ResizeFilter::Bicubic}) {
        for (double s : {0.25, 0.6, 1.3, 1.5}) {
            const Image c = resize(Image(19, 23, 0.6f), s, f);
            for (float v : c.values()) REQUIRE(v == doctest::Approx(0.6f).epsilon(1e-6));
        }
    }

    Image checker(2, 2, 0.0f);
    for (int c = 0; c < 3; ++c) {
        checker.at(c, 0, 0) = 1.0f;
        checker.at(c, 1, 1) = 1.0f;
    }
    const Image pooled = resize(checker, 0.5, ResizeFilter::Area);
    CHECK(pooled.height() == 1);
    CHECK(pooled.width() == 1);
    CHECK(pooled.at(0, 0, 0) == doctest::Approx(0.5f));

    CHECK(code_of([&] { resize(img, 0.01, ResizeFilter::Area); }) == ErrorCode::DegenerateOutput);
    CHECK(resize_filter_from_string("area") == ResizeFilter::Area);
    CHECK(to_string(ResizeFilter::Bicubic) == "bicubic");
    CHECK(code_of([] { resize_filter_from_string("lanczos"); }) == ErrorCode::InvalidParams);
}

TEST_CASE("area downscale by 2 is 2x2 mean pooling") {
    std::mt19937_64 gen(9);
    const Image img = test::random_image(gen, 16, 22);
    const Image out = resize(img, 0.5, ResizeFilter::Area);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 11; ++x) {
                const double m = (img.at(c, 2 * y, 2 * x) + img.at(c, 2 * y + 1, 2 * x) + img.at(c, 2 * y, 2 * x + 1) +
                                  img.at(c, 2 * y + 1, 2 * x + 1)) / 4.0;
                REQUIRE(out.at(c, y, x) == doctest::Approx(m).epsilon(1e-6));
            }
}

TEST_CASE("interpolating filters reproduce linear ramps away from borders") {
    Image ramp(12, 40);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < 12; ++y)
            for (int x = 0; x < 40; ++x) ramp.at(c, y, x) = 0.1f + 0.02f * x;
    for (auto f : {ResizeFilter::Bilinear, ResizeFilter::Bicubic}) {
        const Image up = resize_to(ramp, 12, 80, f);
        for (int x = 4; x < 76; ++x) {
            // Output pixel x samples input coordinate (x + 0.5) / 2 - 0.5.
            const double src = (x + 0.5) / 2.0 - 0.5;
            REQUIRE(up.at(1, 6, x) == doctest::Approx(0.1 + 0.02 * src).epsilon(1e-5));
        }
    }
}

TEST_CASE("gaussian noise statistics") {
    RngStream rng(100, 0);
    const Image flat(512, 512, 0.5f);
    CHECK(add_gaussian_noise(flat, 0.0, rng) == flat);
    const Image noisy = add_gaussian_noise(flat, 0.02, rng);
    CHECK(in_unit_range(noisy));
    double m1 = 0.0, m2 = 0.0;
    const auto plane = noisy.plane(0);
    for (float v : plane) {
        m1 += v;
        m2 += (v - 0.5) * (v - 0.5);
    }
    const double n = static_cast<double>(plane.size());
    CHECK(std::fabs(m1 / n - 0.5) <= 3.0 * 0.02 / 512.0);
    CHECK(m2 / n == doctest::Approx(0.02 * 0.02).epsilon(0.05));
}

TEST_CASE("poisson noise statistics") {
    RngStream rng(101, 0);
    const Image black(64, 64, 0.0f);
    CHECK(add_poisson_noise(black, 1.5, rng) == black);

    const Image half(578, 577, 0.5f);  // 1 000 518 samples across channels
    const Image noisy = add_poisson_noise(half, 1.0, rng);
    CHECK(in_unit_range(noisy));
    double m1 = 0.0, m2 = 0.0;
    for (float v : noisy.values()) {
        m1 += v;
        m2 += (v - 0.5) * (v - 0.5);
    }
    const double n = static_cast<double>(noisy.values().size());
    CHECK(std::fabs(m1 / n - 0.5) <= 0.002);
    const double lambda = 255.0 / 1.0;
    CHECK(m2 / n == doctest::Approx(0.5 / lambda).epsilon(0.02));

    // Larger scale means stronger noise.
    const Image strong = add_poisson_noise(Image(64, 64, 0.5f), 2.0, rng);
    const Image weak = add_poisson_noise(Image(64, 64, 0.5f), 0.1, rng);
    CHECK(mean_abs_error(strong, Image(64, 64, 0.5f)) > mean_abs_error(weak, Image(64, 64, 0.5f)));
}

TEST_CASE("jpeg round-trip quality behavior") {
    const Image img = test::smooth_image(64, 96);
    CHECK(eval::psnr(img, jpeg_roundtrip(img, 100)) > 40.0);
    double prev = 1e9;
    for (int q : {30, 50, 70, 90}) {
        const double mae = mean_abs_error(img, jpeg_roundtrip(img, q));
        CAPTURE(q);
        CHECK(mae <= prev);
        prev = mae;
    }
    const Image gray(32, 32, 0.5f);
    CHECK(test::max_abs_diff(gray, jpeg_roundtrip(gray, 90)) < 2.0 / 255.0);
    CHECK(code_of([&] { jpeg_roundtrip(img, 29); }) == ErrorCode::EncodeError);
    CHECK(code_of([&] { jpeg_roundtrip(img, 101); }) == ErrorCode::EncodeError);
    CHECK(jpeg_roundtrip(img, 55) == jpeg_roundtrip(img, 55));
}

TEST_CASE("apply_generic") {
    std::mt19937_64 gen(11);
    const Image img = test::random_image(gen, 40, 36);
    {
        RngStream rng(1, 1);
        GenericDraws d;
        CHECK(apply_generic(img, GenericParams::all_skipped(), rng, d) == img);
        CHECK_FALSE(d.blur);
        CHECK_FALSE(d.resize);
        CHECK_FALSE(d.noise);
        CHECK_FALSE(d.jpeg);
    }
    GenericParams p;
    for (std::uint64_t i = 0; i < 20; ++i) {
        RngStream a(2, i), b(2, i);
        GenericDraws da, db;
        const Image oa = apply_generic(img, p, a, da);
        const Image ob = apply_generic(img, p, b, db);
        CHECK(oa == ob);
        CHECK(in_unit_range(oa));
        REQUIRE(da.blur);
        REQUIRE(da.resize);
        REQUIRE(da.noise);
        REQUIRE(da.jpeg);
        CHECK(oa.height() == da.resize->height);
        CHECK(oa.width() == da.resize->width);
        CHECK(da.jpeg->quality >= 30);
        CHECK(da.jpeg->quality <= 95);
        CHECK(a.draw_counter() == b.draw_counter());
    }
}

TEST_CASE("blur kernels are clipped to small images") {
    GenericParams p = GenericParams::all_skipped();
    p.blur.skip_prob = 0.0;
    p.blur.kernel_size_min = 21;
    RngStream rng(3, 3);
    GenericDraws d;
    const Image out = apply_generic(Image(9, 12, 0.5f), p, rng, d);
    REQUIRE(d.blur);
    CHECK(d.blur->kernel_size == 9);
    CHECK(out.height() == 9);
}

TEST_CASE("generic parameter validation") {
    CHECK_NOTHROW(GenericParams{}.validate());
    GenericParams p;
    p.blur.kernel_size_min = 8;
    CHECK(code_of([&] { p.validate(); }) == ErrorCode::InvalidParams);
    p = {};
    p.resize.filters.clear();
    CHECK(code_of([&] { p.validate(); }) == ErrorCode::InvalidParams);
    p = {};
    p.jpeg.quality_min = 20;
    CHECK(code_of([&] { p.validate(); }) == ErrorCode::InvalidParams);
}
