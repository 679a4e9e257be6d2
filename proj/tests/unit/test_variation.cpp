/// @file test_variation.cpp
/// @brief p-variation by dynamic programming against brute force, controls, local seminorm.

#include "oracles.hpp"
#include "roughns/errors.hpp"
#include "roughns/variation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace roughns;

namespace {

TwoIndexMap random_map(const TimeGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return TwoIndexMap::from_function(g, [&](std::size_t, std::size_t) { return u(rng); });
}

Control random_control(const TimeGrid& g, std::uint64_t seed) {
    // Variation controls of random maps are superadditive by construction.
    return control_from_variation(random_map(g, seed), 1.5);
}

}  // namespace

TEST(PVariation, AdditiveMapWithUnitExponent) {
    const TimeGrid g = uniform_grid(3.0, 12);
    const auto gmap = TwoIndexMap::from_function(g, [&](std::size_t i, std::size_t j) { return g.time(j) - g.time(i); });
    EXPECT_NEAR(p_variation(gmap, 1.0), 3.0, 1e-12);
    EXPECT_NEAR(p_variation(gmap, 1.0, 2, 7), g.time(7) - g.time(2), 1e-12);
}

TEST(PVariation, ZigZag) {
    PathSamples z{TimeGrid{0.0, 1.0, 2}, 1, {0.0, 1.0, 0.0}, Generator::user, 0.5};
    EXPECT_NEAR(p_variation(TwoIndexMap::from_increments(z), 1.0), 2.0, 1e-15);
}

TEST(PVariation, SquareExponentOnEightPoints) {
    const TimeGrid g = uniform_grid(1.0, 7);
    const auto gmap = TwoIndexMap::from_function(g, [&](std::size_t i, std::size_t j) { return g.time(j) - g.time(i); });
    EXPECT_NEAR(oracle::brute_force_p_variation(gmap, 2.0, 0, 7), 1.0, 1e-14);
    EXPECT_NEAR(p_variation(gmap, 2.0), 1.0, 1e-14);
}

TEST(PVariation, RejectsSmallExponentAndBadWindow) {
    const auto g = random_map(uniform_grid(1.0, 5), 1);
    EXPECT_THROW(p_variation(g, 0.9), Error);
    try {
        p_variation(g, 0.5);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_parameter);
    }
    EXPECT_THROW(p_variation(g, 2.0, 3, 3), Error);
}

TEST(PVariationProperty, MatchesBruteForceAndDominatesPairs) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::size_t n = 2 + seed % 8;  // up to 10 points
        const auto g = random_map(uniform_grid(1.0, n), seed);
        for (double p : {1.0, 1.7, 2.5, 3.0}) {
            const double dp = p_variation(g, p);
            EXPECT_NEAR(dp, oracle::brute_force_p_variation(g, p, 0, n), 1e-12);
            for (std::size_t i = 0; i <= n; ++i)
                for (std::size_t j = i; j <= n; ++j) EXPECT_GE(dp + 1e-15, g(i, j));
        }
    }
}

TEST(PVariationProperty, MonotoneInExponent) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = random_map(uniform_grid(1.0, 30), seed);
        double prev = p_variation(g, 1.0);
        for (double p = 1.25; p <= 6.0; p += 0.25) {
            const double v = p_variation(g, p);
            EXPECT_LE(v, prev * (1.0 + 1e-12));
            prev = v;
        }
    }
}

TEST(ControlFromVariation, AdditiveAndZero) {
    const TimeGrid g = uniform_grid(1.0, 9);
    const auto add = TwoIndexMap::from_function(g, [&](std::size_t i, std::size_t j) { return 2.0 * (g.time(j) - g.time(i)); });
    const Control w = control_from_variation(add, 1.0);
    for (std::size_t i = 0; i <= 9; ++i)
        for (std::size_t j = i; j <= 9; ++j) EXPECT_NEAR(w(i, j), add(i, j), 1e-14);
    EXPECT_TRUE(is_control(w).ok);
    const Control zero = control_from_variation(TwoIndexMap(g), 2.0);
    for (std::size_t i = 0; i <= 9; ++i) EXPECT_EQ(zero.row(i)[9 - i], 0.0);
}

TEST(ControlFromVariation, FbmFirstLevel) {
    const auto z = sample_fbm(0.45, 2, uniform_grid(1.0, 127), 3);
    const RoughPath rp = lift_piecewise_linear(z, 0.4);
    const auto g = TwoIndexMap::from_first_level(rp);
    const double p = 1.0 / rp.alpha();
    const Control w = control_from_variation(g, p);
    EXPECT_TRUE(is_control(w).ok) << is_control(w).worst;
    for (std::size_t i = 0; i <= 127; ++i)
        for (std::size_t j = i; j <= 127; ++j) EXPECT_LE(std::pow(g(i, j), p), w(i, j) * (1.0 + 1e-12));
}

TEST(ControlFromVariationProperty, AlwaysAControl) {
    for (std::uint64_t seed = 0; seed < 10; ++seed)
        for (double p : {0.4, 1.0, 2.5}) {
            const Control w = control_from_variation(random_map(uniform_grid(1.0, 40), seed), p);
            EXPECT_TRUE(is_control(w).ok) << "seed " << seed << " p " << p;
        }
}

TEST(IsControl, LinearSqrtAndSum) {
    const TimeGrid g = uniform_grid(1.0, 20);
    const double R = 1.7, alpha = 0.4;
    const Control wz = Control::linear(g, std::pow(R, 1.0 / alpha));
    EXPECT_TRUE(is_control(wz).ok);
    const Control root = Control::from_function(g, [&](std::size_t i, std::size_t j) { return std::sqrt(g.time(j) - g.time(i)); });
    const ControlCheck bad = is_control(root);
    EXPECT_FALSE(bad.ok);
    EXPECT_GT(bad.worst, 0.0);
    EXPECT_LT(bad.i, bad.j);
    EXPECT_LT(bad.j, bad.k);
    EXPECT_TRUE(is_control(wz + random_control(g, 4)).ok);
}

TEST(IsControlProperty, ExponentRuleProducts) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const TimeGrid g = uniform_grid(1.0, 25);
        const Control a = random_control(g, seed), b = random_control(g, seed + 100);
        const ControlCheck c = is_control(product(a, 2.0 / 3.0, b, 1.0 / 3.0));
        EXPECT_TRUE(c.ok) << c.worst;
    }
}

TEST(LocalSeminorm, InactiveConstraintMatchesPVariation) {
    const TimeGrid g = uniform_grid(1.0, 15);
    const auto m = random_map(g, 6);
    const Control varpi = Control::linear(g, 1.0);
    const LocalSeminorm s = local_variation_seminorm(m, 2.0, varpi, 10.0);
    EXPECT_FALSE(s.empty_window);
    EXPECT_NEAR(s.value, p_variation(m, 2.0), 1e-12);
}

TEST(LocalSeminorm, TinyWindowIsEmpty) {
    const TimeGrid g = uniform_grid(1.0, 15);
    const LocalSeminorm s = local_variation_seminorm(random_map(g, 6), 2.0, Control::linear(g, 1.0), 1e-9);
    EXPECT_TRUE(s.empty_window);
    EXPECT_EQ(s.value, 0.0);
    EXPECT_THROW(local_variation_seminorm(random_map(g, 6), 2.0, Control::linear(g, 1.0), 0.0), Error);
}

TEST(LocalSeminorm, RestrictedPairsDominateIncrements) {
    const TimeGrid g = uniform_grid(1.0, 30);
    const auto m = random_map(g, 12);
    const Control varpi = Control::linear(g, 1.0);
    const double L = 0.2;
    const LocalSeminorm s = local_variation_seminorm(m, 3.0, varpi, L);
    auto admissible = [&](std::size_t i, std::size_t j) { return varpi(i, j) <= L; };
    const Control w = control_from_variation(m, 3.0, admissible);
    EXPECT_TRUE(is_control(w).ok);
    for (std::size_t i = 0; i <= 30; ++i)
        for (std::size_t j = i + 1; j <= 30; ++j)
            if (admissible(i, j)) EXPECT_LE(m(i, j), s.c * std::cbrt(w(i, j)) * (1.0 + 1e-12));
    EXPECT_LE(s.value, p_variation(m, 3.0) * (1.0 + 1e-12));
}
