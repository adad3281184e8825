// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "hmbsynth/error.hpp"
#include "hmbsynth/osd_math.hpp"
#include "test_util.hpp"

using namespace hmbsynth;
using namespace hmbsynth::osd;

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

LatentTensor scalar(double v) { return LatentTensor({1}, std::vector<double>{v}); }

LatentTensor random_tensor(std::mt19937_64& gen, std::vector<std::size_t> shape) {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    std::normal_distribution<double> nd;
    std::vector<double> v(n);
    for (double& x : v) x = nd(gen);
    return LatentTensor(std::move(shape), std::move(v));
}

// Eq. 7 written out directly.
double sigma_oracle(double a_t, double a_prev, double eta) {
    return eta * std::sqrt((1.0 - a_prev) / (1.0 - a_t) * (1.0 - a_t / a_prev));
}

}  // namespace

TEST_CASE("alpha_bar") {
    CHECK(alpha_bar(NoiseSchedule({0.1}), 1) == doctest::Approx(0.9).epsilon(1e-15));
    const NoiseSchedule two({0.1, 0.1});
    CHECK(alpha_bar(two, 1) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(alpha_bar(two, 2) == doctest::Approx(0.81).epsilon(1e-15));
    CHECK(alpha_bar(two, 0) == 1.0);
    CHECK(code_of([&] { alpha_bar(two, 3); }) == ErrorCode::IndexOutOfRange);
    const NoiseSchedule zero({0.0, 0.0, 0.0});
    for (std::size_t t = 1; t <= 3; ++t) CHECK(alpha_bar(zero, t) == 1.0);

    const auto sl = NoiseSchedule::scaled_linear();
    CHECK(sl.length() == 1000);
    for (std::size_t i = 1; i < sl.length(); ++i) REQUIRE(sl.alpha_bars()[i] < sl.alpha_bars()[i - 1]);
    CHECK(sl.alpha_bars().back() > 0.0);
    CHECK(sl.betas().front() == doctest::Approx(0.00085));
    CHECK(sl.betas().back() == doctest::Approx(0.012));
    CHECK(code_of([] { NoiseSchedule({0.5, 1.0}); }) == ErrorCode::InvalidParams);
}

TEST_CASE("forward_noise") {
    CHECK(forward_noise(scalar(2.0), scalar(1.0), 1.0)[0] == 2.0);
    CHECK(forward_noise(scalar(2.0), scalar(1.0), 0.25)[0] == doctest::Approx(1.0 + std::sqrt(0.75)).epsilon(1e-15));
    CHECK(forward_noise(scalar(3.0), scalar(0.0), 0.64)[0] == doctest::Approx(0.8 * 3.0).epsilon(1e-15));
    CHECK(code_of([] { forward_noise(LatentTensor({2}), LatentTensor({3}), 0.5); }) == ErrorCode::ShapeMismatch);
    CHECK(code_of([] { forward_noise(scalar(1), scalar(1), 0.0); }) == ErrorCode::InvalidParams);
}

TEST_CASE("one_step_latent inverts forward_noise") {
    const auto zt = forward_noise(scalar(2.0), scalar(1.0), 0.25);
    CHECK(std::fabs(one_step_latent(zt, scalar(1.0), 0.25)[0] - 2.0) <= 1e-12);
    CHECK(one_step_latent(scalar(0.7), scalar(0.0), 1.0)[0] == 0.7);

    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> ua(1e-3, 1.0);
    for (int i = 0; i < 500; ++i) {
        const auto z = random_tensor(gen, {2, 3, 4});
        const auto e = random_tensor(gen, {2, 3, 4});
        const double a = ua(gen);
        const auto back = one_step_latent(forward_noise(z, e, a), e, a);
        for (std::size_t k = 0; k < z.size(); ++k) REQUIRE(std::fabs(back[k] - z[k]) <= 1e-9);
    }
}

TEST_CASE("sigma_t") {
    const NoiseSchedule two({0.1, 0.1});
    CHECK(sigma_t(two, 2, 1, 0.0) == 0.0);
    const double s1 = sigma_t(two, 2, 1, 1.0);
    CHECK(s1 * s1 == doctest::Approx(0.1 / 0.19 * 0.1).epsilon(1e-12));
    CHECK(s1 == doctest::Approx(0.22942).epsilon(1e-4));
    CHECK(sigma_t(two, 2, 1, 0.5) == doctest::Approx(0.5 * s1).epsilon(1e-15));
    CHECK(sigma_t(two, 2, 0, 1.0) == 0.0);
    CHECK(code_of([&] { sigma_t(two, 1, 2, 1.0); }) == ErrorCode::InvalidTimestepOrder);

    const auto sched = NoiseSchedule::scaled_linear();
    double prev = -1.0;
    for (double eta = 0.0; eta <= 1.0; eta += 0.125) {
        const double s = sigma_t(sched, 700, 650, eta);
        CHECK(s >= prev);
        CHECK(s == doctest::Approx(sigma_oracle(alpha_bar(sched, 700), alpha_bar(sched, 650), eta)).epsilon(1e-12));
        prev = s;
    }
}

TEST_CASE("cfg_combine") {
    std::mt19937_64 gen(22);
    const auto pos = random_tensor(gen, {4, 4});
    const auto neg = random_tensor(gen, {4, 4});
    CHECK(cfg_combine(pos, neg, 1.0) == pos);
    CHECK(cfg_combine(pos, neg, 0.0) == neg);
    CHECK(cfg_combine(scalar(1.0), scalar(0.0), kDefaultLambdaCfg)[0] == 3.5);
    const auto a = cfg_combine(pos, neg, 1.5), b = cfg_combine(pos, neg, 4.5), m = cfg_combine(pos, neg, 3.0);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] + b[i] == doctest::Approx(2.0 * m[i]).epsilon(1e-12));
    CHECK(code_of([] { cfg_combine(LatentTensor({2}), LatentTensor({1, 2}), 1.0); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("ddim_step") {
    std::mt19937_64 gen(23);
    const auto sched = NoiseSchedule::scaled_linear();
    const auto zt = random_tensor(gen, {3, 5});
    const auto eps = random_tensor(gen, {3, 5});
    const auto noise = random_tensor(gen, {3, 5});

    const auto terminal = ddim_step(zt, eps, sched, 500, 0, 0.0, {});
    const auto direct = one_step_latent(zt, eps, alpha_bar(sched, 500));
    for (std::size_t i = 0; i < zt.size(); ++i) CHECK(terminal[i] == doctest::Approx(direct[i]).epsilon(1e-12));

    const auto noop = ddim_step_from_alpha_bars(zt, eps, 0.6, 0.6, 0.0, {});
    for (std::size_t i = 0; i < zt.size(); ++i) CHECK(noop[i] == doctest::Approx(zt[i]).epsilon(1e-12));

    // eta = 0 ignores fresh noise entirely.
    CHECK(ddim_step(zt, eps, sched, 800, 600, 0.0, noise) == ddim_step(zt, eps, sched, 800, 600, 0.0, {}));

    // Independent evaluation of the three-term update.
    for (double eta : {0.0, 0.3, 1.0}) {
        const double at = alpha_bar(sched, 800), ap = alpha_bar(sched, 600);
        const double sg = sigma_oracle(at, ap, eta);
        const auto out = ddim_step(zt, eps, sched, 800, 600, eta, noise);
        for (std::size_t i = 0; i < zt.size(); ++i) {
            const double z0 = (zt[i] - std::sqrt(1.0 - at) * eps[i]) / std::sqrt(at);
            const double expect = std::sqrt(ap) * z0 + std::sqrt(1.0 - ap - sg * sg) * eps[i] + sg * noise[i];
            CHECK(out[i] == doctest::Approx(expect).epsilon(1e-13));
        }
    }
    CHECK(code_of([&] { ddim_step(zt, eps, sched, 10, 20, 0.0, {}); }) == ErrorCode::InvalidTimestepOrder);
    CHECK(code_of([&] { ddim_step(zt, eps, sched, 800, 600, 1.0, {}); }) == ErrorCode::ShapeMismatch);
    // Eta above 1 can push sigma^2 beyond 1 - alpha_bar_prev.
    CHECK(code_of([&] { ddim_step_from_alpha_bars(zt, eps, 0.1, 0.9, 10.0, noise); }) ==
          ErrorCode::NegativeRadicand);
}

TEST_CASE("dice_loss examples") {
    BinaryMask target(2, 2, 0);
    target.at(0, 0) = 1;
    target.at(1, 0) = 1;
    WeightMap pred(2, 2, 0.0f);
    pred.at(0, 0) = 1.0f;
    pred.at(0, 1) = 1.0f;
    CHECK(dice_loss(pred, target) == 0.5);

    WeightMap same(2, 2, 0.0f);
    same.at(0, 0) = 1.0f;
    same.at(1, 0) = 1.0f;
    CHECK(dice_loss(same, target) == 0.0);

    WeightMap disjoint(2, 2, 0.0f);
    disjoint.at(1, 1) = 1.0f;
    CHECK(dice_loss(disjoint, target) == 1.0);
    CHECK(dice_loss(WeightMap(2, 2, 0.0f), BinaryMask(2, 2, 0)) == 0.0);
    CHECK(code_of([&] { dice_loss(WeightMap(3, 2), target); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("dice_loss against set arithmetic") {
    std::mt19937_64 gen(24);
    std::bernoulli_distribution coin(0.4);
    for (int trial = 0; trial < 200; ++trial) {
        const int h = 1 + trial % 17, w = 1 + trial % 13;
        WeightMap pred(h, w);
        BinaryMask target(h, w);
        long a = 0, b = 0, both = 0;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const bool p = coin(gen), t = coin(gen);
                pred.at(y, x) = p ? 1.0f : 0.0f;
                target.at(y, x) = t;
                a += p;
                b += t;
                both += p && t;
            }
        }
        const double expect = a + b == 0 ? 0.0 : 1.0 - 2.0 * static_cast<double>(both) / static_cast<double>(a + b);
        CHECK(dice_loss(pred, target) == expect);
    }
}

TEST_CASE("l1, mse and the DPG objective") {
    const Image zero(4, 4, 0.0f), one(4, 4, 1.0f), half(4, 4, 0.5f);
    CHECK(l1_loss(zero, zero) == 0.0);
    CHECK(l1_loss(zero, one) == 1.0);
    CHECK(mse_loss(zero, one) == 1.0);
    CHECK(l1_loss(zero, half) == 0.5);
    CHECK(mse_loss(zero, half) == 0.25);
    CHECK(code_of([&] { l1_loss(zero, Image(3, 4)); }) == ErrorCode::ShapeMismatch);

    CHECK(dpg_total_loss(0, 0, 0) == 0.0);
    CHECK(dpg_total_loss(0.1, 0.2, 0.5) == doctest::Approx(0.31).epsilon(1e-15));
    CHECK(dpg_total_loss(0.1, 0.2, 0.5, 0.0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(code_of([] { dpg_total_loss(-0.1, 0, 0); }) == ErrorCode::NegativeTerm);

    // Perfect predictions give zero objective.
    std::mt19937_64 gen(25);
    const Image hq = test::random_image(gen, 6, 5), lq = test::random_image(gen, 6, 5);
    std::vector<float> residual(hq.values().size());
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = lq.values()[i] - hq.values()[i];
    BinaryMask m(6, 5, 0);
    m.at(2, 2) = 1;
    WeightMap pm(6, 5, 0.0f);
    pm.at(2, 2) = 1.0f;
    CHECK(dpg_objective(hq, residual, pm, hq, lq, m) == 0.0);
    CHECK(dpg_objective(hq, residual, WeightMap(6, 5, 0.0f), hq, lq, m) == doctest::Approx(kDefaultDiceWeight));
}

TEST_CASE("sobel edges") {
    const Image flat = sobel_edges(Image(9, 9, 0.4f));
    for (float v : flat.values()) CHECK(v == 0.0f);

    Image step(8, 10, 0.0f);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < 8; ++y)
            for (int x = 5; x < 10; ++x) step.at(c, y, x) = 1.0f;
    const Image e = sobel_edges(step);
    for (int y = 0; y < 8; ++y) {
        CHECK(e.at(0, y, 4) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
        CHECK(e.at(0, y, 5) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
        CHECK(e.at(0, y, 2) == 0.0f);
        CHECK(e.at(0, y, 8) == 0.0f);
    }

    std::mt19937_64 gen(26);
    const Image img = test::random_image(gen, 11, 14);
    Image rot(14, 11);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < 11; ++y)
            for (int x = 0; x < 14; ++x) rot.at(c, x, 10 - y) = img.at(c, y, x);
    const Image ea = sobel_edges(img), eb = sobel_edges(rot);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < 11; ++y)
            for (int x = 0; x < 14; ++x) REQUIRE(eb.at(c, x, 10 - y) == doctest::Approx(ea.at(c, y, x)).epsilon(1e-6));
    for (float v : ea.values()) {
        REQUIRE(v >= 0.0f);
        REQUIRE(v <= 1.0f);
    }
}

TEST_CASE("edge-aware distance") {
    const ImageDistance mse = [](const Image& a, const Image& b) { return mse_loss(a, b); };
    const ImageDistance l1 = [](const Image& a, const Image& b) { return l1_loss(a, b); };
    std::mt19937_64 gen(27);
    const Image a = test::random_image(gen, 12, 12), b = test::random_image(gen, 12, 12);
    CHECK(edge_aware_distance(mse, a, a) == 0.0);
    CHECK(edge_aware_distance(mse, Image(8, 8, 0.25f), Image(8, 8, 0.75f)) == doctest::Approx(0.25));
    CHECK(edge_aware_distance(l1, a, b) == l1_loss(a, b) + l1_loss(sobel_edges(a), sobel_edges(b)));
}
