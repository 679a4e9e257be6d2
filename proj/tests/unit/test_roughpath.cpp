/// @file test_roughpath.cpp
/// @brief Lifts, Chen relation, Hoelder norms, fBm sampling, shifts and Wong-Zakai levels.

#include "oracles.hpp"
#include "roughns/errors.hpp"
#include "roughns/roughpath.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace roughns;

namespace {

PathSamples linear_path(std::size_t n) {
    return make_samples(uniform_grid(1.0, n), 1, [](double t, std::size_t) { return t; });
}

void expect_kind(ErrorKind kind, const std::function<void()>& f) {
    try {
        f();
        ADD_FAILURE() << "expected " << to_string(kind);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), kind) << e.what();
    }
}

}  // namespace

TEST(Lift, LinearPathOnThreePoints) {
    const RoughPath rp = lift_piecewise_linear(linear_path(2), 0.5);
    EXPECT_NEAR(rp.z(0, 2, 0), 1.0, 1e-15);
    EXPECT_NEAR(rp.zz(0, 2, 0, 0), 0.5, 1e-15);
}

TEST(Lift, ConstantPathIsZero) {
    const auto z = make_samples(uniform_grid(1.0, 10), 2, [](double, std::size_t a) { return 3.0 + a; });
    const RoughPath rp = lift_piecewise_linear(z, 0.5);
    for (std::size_t i = 0; i <= 10; ++i)
        for (std::size_t j = i; j <= 10; ++j) {
            EXPECT_EQ(rp.z(i, j, 1), 0.0);
            EXPECT_EQ(rp.zz(i, j, 0, 1), 0.0);
        }
}

TEST(Lift, CrossIntegralOfTimeAndSquare) {
    auto x = [](double t, std::size_t a) { return a == 0 ? t : t * t; };
    auto dx = [](double t, std::size_t a) { return a == 0 ? 1.0 : 2.0 * t; };
    const RoughPath rp = lift_piecewise_linear(make_samples(uniform_grid(1.0, 63), 2, x), 0.5);
    const double reference = oracle::iterated_integral(x, dx, 0.0, 1.0, 0, 1);
    EXPECT_NEAR(reference, 2.0 / 3.0, 1e-8);
    EXPECT_NEAR(rp.zz(0, 63, 0, 1), reference, 1e-3);
}

TEST(Lift, InteriorPairsConvergeToIteratedIntegrals) {
    auto x = [](double t, std::size_t a) { return a == 0 ? std::sin(3.0 * t) : std::cos(2.0 * t); };
    auto dx = [](double t, std::size_t a) { return a == 0 ? 3.0 * std::cos(3.0 * t) : -2.0 * std::sin(2.0 * t); };
    double prev = 1.0;
    for (std::size_t n : {16, 64, 256}) {
        const RoughPath rp = lift_piecewise_linear(make_samples(uniform_grid(1.0, n), 2, x), 0.5);
        const std::size_t i = n / 4, j = 3 * n / 4;
        const double err = std::abs(rp.zz(i, j, 1, 0) -
                                    oracle::iterated_integral(x, dx, 0.25, 0.75, 1, 0, 100000));
        EXPECT_LT(err, prev);
        prev = err;
    }
    EXPECT_LT(prev, 1e-4);
}

TEST(Lift, RejectsEmptyGridAndBadAlpha) {
    PathSamples z;
    z.grid = TimeGrid{0.0, 1.0, 0};
    expect_kind(ErrorKind::invalid_input, [&] { lift_piecewise_linear(z, 0.4); });
    expect_kind(ErrorKind::invalid_parameter, [&] { lift_piecewise_linear(linear_path(4), 0.3); });
    const auto fbm = sample_fbm(0.4, 1, uniform_grid(1.0, 8), 1);
    expect_kind(ErrorKind::invalid_parameter, [&] { lift_piecewise_linear(fbm, 0.4); });
}

TEST(Lift, LazyAndDenseStorageAgreeBitwise) {
    const auto z = sample_fbm(0.45, 2, uniform_grid(1.0, 40), 3);
    const RoughPath dense = lift_piecewise_linear(z, 0.4);
    const RoughPath lazy = lift_piecewise_linear(z, 0.4, 10);
    ASSERT_TRUE(dense.dense());
    ASSERT_FALSE(lazy.dense());
    std::vector<double> s1, s2;
    for (std::size_t i = 0; i <= 40; ++i) {
        const RowView a = dense.row(i, s1), b = lazy.row(i, s2);
        for (std::size_t q = 0; q < a.len; ++q) {
            EXPECT_EQ(a.z(1)[q], b.z(1)[q]);
            EXPECT_EQ(a.zz(0, 1)[q], b.zz(0, 1)[q]);
        }
    }
    EXPECT_EQ(dense.zz(3, 17, 1, 0), lazy.zz(3, 17, 1, 0));
    EXPECT_LE(check_chen(lazy).residual, 1e-12);
}

TEST(Chen, LiftsAreExact) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto z = sample_fbm(0.4, 3, uniform_grid(1.0, 128), seed);
        const RoughPath rp = lift_piecewise_linear(z, 0.35);
        EXPECT_LE(check_chen(rp).residual, 1e-12);
        EXPECT_LE(additivity_residual(rp), 1e-12);
        EXPECT_LE(symmetry_residual(rp), 1e-12);
    }
}

TEST(Chen, DetectsBumpedEntryWithWitness) {
    const RoughPath rp = lift_piecewise_linear(sample_fbm(0.45, 2, uniform_grid(1.0, 20), 9), 0.4);
    const RoughPath bad = rp.bumped(4, 11, 1, 0, 1.0);
    const ChenReport rep = check_chen(bad);
    EXPECT_GE(rep.residual, 1.0 - 1e-12);
    EXPECT_EQ(rep.a, 1u);
    EXPECT_EQ(rep.b, 0u);
    EXPECT_TRUE(rep.i == 4 || rep.j == 4 || rep.k == 11 || rep.j == 11);
}

TEST(Chen, AdditiveSecondLevelWithZeroFirstLevel) {
    const TimeGrid g = uniform_grid(2.0, 30);
    const double A[4] = {0.3, -1.2, 2.5, 0.7};
    const RoughPath rp = RoughPath::from_pairs(g, 2, 0.4, [&](std::size_t i, std::size_t j, std::span<double>,
                                                              std::span<double> zz) {
        for (int c = 0; c < 4; ++c) zz[c] = A[c] * (g.time(j) - g.time(i));
    });
    EXPECT_LE(check_chen(rp).residual, 1e-14);
}

TEST(Chen, TenThousandPointBrownianLiftSampledTriples) {
    const auto z = sample_fbm(0.5, 2, uniform_grid(1.0, 9999), 17);
    const RoughPath rp = lift_piecewise_linear(z, 0.45);
    ASSERT_FALSE(rp.dense());
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> pick(0, 9999);
    std::vector<double> si, sj;
    double worst = 0.0;
    for (int r = 0; r < 40; ++r) {
        std::size_t i = pick(rng), j = pick(rng);
        if (i > j) std::swap(i, j);
        const RowView ri = rp.row(i, si), rj = rp.row(j, sj);
        for (std::size_t k = j; k <= 9999; ++k)
            for (std::size_t a = 0; a < 2; ++a)
                for (std::size_t b = 0; b < 2; ++b) {
                    const double res = ri.zz(a, b)[k - i] - rj.zz(a, b)[k - j] - ri.zz(a, b)[j - i] -
                                       ri.z(a)[j - i] * rj.z(b)[k - j];
                    worst = std::max(worst, std::abs(res));
                }
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(Holder, LinearPathHalfExponent) {
    const RoughPath rp = lift_piecewise_linear(linear_path(50), 0.5);
    const HolderNorms h = holder_norms(rp);
    // Grid sup oracle: |t_j - t_i|^{1/2} is maximal on the full interval.
    double sup = 0.0;
    for (std::size_t i = 0; i <= 50; ++i)
        for (std::size_t j = i + 1; j <= 50; ++j) sup = std::max(sup, (j - i) / 50.0 / std::sqrt((j - i) / 50.0));
    EXPECT_NEAR(h.z, sup, 1e-12);
    EXPECT_NEAR(h.z, 1.0, 1e-12);
    EXPECT_NEAR(h.triple, h.z + h.zz, 0.0);
}

TEST(Holder, ConstantPathAndScaling) {
    const auto c = make_samples(uniform_grid(1.0, 10), 1, [](double, std::size_t) { return 2.0; });
    const HolderNorms zero = holder_norms(lift_piecewise_linear(c, 0.4));
    EXPECT_EQ(zero.triple, 0.0);
    const auto z = sample_fbm(0.45, 2, uniform_grid(1.0, 64), 4);
    PathSamples scaled = z;
    for (double& v : scaled.values) v *= -3.0;
    const HolderNorms a = holder_norms(lift_piecewise_linear(z, 0.4));
    const HolderNorms b = holder_norms(lift_piecewise_linear(scaled, 0.4));
    EXPECT_NEAR(b.z, 3.0 * a.z, 1e-12 * b.z);
    EXPECT_NEAR(b.zz, 9.0 * a.zz, 1e-12 * b.zz);
    expect_kind(ErrorKind::invalid_interval, [&] { holder_norms(lift_piecewise_linear(z, 0.4), 5, 5); });
}

TEST(Holder, StableUnderRefinement) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto fine = sample_fbm(0.45, 1, uniform_grid(1.0, 2048), seed);
        const double ref = holder_norms(lift_piecewise_linear(fine, 0.35)).z;
        for (std::size_t s : {8, 4, 2}) {
            const double v = holder_norms(lift_piecewise_linear(subsample(fine, s), 0.35)).z;
            EXPECT_TRUE(std::isfinite(v));
            EXPECT_NEAR(v / ref, 1.0, 0.2) << "seed " << seed << " stride " << s;
        }
    }
}

TEST(Distance, BasicProperties) {
    const auto za = sample_fbm(0.45, 2, uniform_grid(1.0, 32), 1);
    const auto zb = sample_fbm(0.45, 2, uniform_grid(1.0, 32), 2);
    const RoughPath a = lift_piecewise_linear(za, 0.4), b = lift_piecewise_linear(zb, 0.4);
    EXPECT_EQ(rough_distance(a, a), 0.0);
    EXPECT_EQ(rough_distance(a, b), rough_distance(b, a));
    expect_kind(ErrorKind::incompatible_paths, [&] { rough_distance(a, lift_piecewise_linear(za, 0.35)); });
    expect_kind(ErrorKind::incompatible_paths,
                [&] { rough_distance(a, lift_piecewise_linear(sample_fbm(0.45, 2, uniform_grid(1.0, 16), 1), 0.4)); });
}

TEST(Distance, DecreasesWithMesh) {
    int decreasing = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto z = sample_fbm(0.45, 2, uniform_grid(1.0, 256), 100 + seed);
        const auto lifts = wong_zakai_sequence(z, {8, 4, 1}, 0.4);
        if (rough_distance(lifts[1], lifts[2]) < rough_distance(lifts[0], lifts[2])) ++decreasing;
    }
    EXPECT_GE(decreasing, 15);
}

TEST(Fbm, DeterministicAndValidated) {
    const TimeGrid g = uniform_grid(1.0, 50);
    const auto a = sample_fbm(0.4, 3, g, 77), b = sample_fbm(0.4, 3, g, 77), c = sample_fbm(0.4, 3, g, 78);
    EXPECT_EQ(a.values, b.values);
    EXPECT_NE(a.values, c.values);
    EXPECT_EQ(a.value(0, 2), 0.0);
    expect_kind(ErrorKind::invalid_parameter, [&] { sample_fbm(0.3, 1, g, 1); });
    expect_kind(ErrorKind::invalid_parameter, [&] { sample_fbm(1.2, 1, g, 1); });
    EXPECT_NO_THROW(sample_fbm(1.0, 1, g, 1));
}

class FbmVariance : public ::testing::TestWithParam<double> {};

TEST_P(FbmVariance, MonteCarloMatchesCovariance) {
    const double H = GetParam();
    const TimeGrid g = uniform_grid(1.0, 16);
    const std::size_t seeds = 10000;
    const std::vector<std::pair<std::size_t, std::size_t>> pairs = {{0, 16}, {3, 4}, {2, 10}, {7, 15}};
    std::vector<double> sum2(pairs.size(), 0.0);
    for (std::size_t s = 0; s < seeds; ++s) {
        const auto z = sample_fbm(H, 1, g, s);
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const double d = z.value(pairs[p].second, 0) - z.value(pairs[p].first, 0);
            sum2[p] += d * d;
        }
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const double expected = std::pow(g.time(pairs[p].second) - g.time(pairs[p].first), 2.0 * H);
        EXPECT_NEAR(sum2[p] / seeds / expected, 1.0, 0.05) << "pair " << p;
    }
}

INSTANTIATE_TEST_SUITE_P(Hurst, FbmVariance, ::testing::Values(0.5, 0.4));

TEST(Shift, IdentitySemigroupAndChen) {
    const auto z = sample_fbm(0.45, 2, uniform_grid(1.0, 60), 8);
    const RoughPath rp = lift_piecewise_linear(z, 0.4);
    const RoughPath s0 = shift(rp, 0);
    EXPECT_EQ(s0.zz(2, 40, 0, 1), rp.zz(2, 40, 0, 1));
    expect_kind(ErrorKind::invalid_shift, [&] { shift(rp, 60); });
    const RoughPath twice = shift(shift(rp, 7), 11);
    const RoughPath once = shift(rp, 18);
    ASSERT_EQ(twice.grid(), once.grid());
    for (std::size_t i = 0; i <= once.grid().n; ++i)
        for (std::size_t j = i; j <= once.grid().n; ++j) {
            EXPECT_EQ(twice.z(i, j, 1), once.z(i, j, 1));
            EXPECT_EQ(twice.zz(i, j, 1, 0), once.zz(i, j, 1, 0));
            EXPECT_EQ(once.zz(i, j, 0, 1), rp.zz(i + 18, j + 18, 0, 1));
        }
    EXPECT_LE(check_chen(once).residual, 1e-12);
}

TEST(Shift, CompatibleWithWindowExtraction) {
    const auto z = sample_fbm(0.4, 2, uniform_grid(1.0, 48), 21);
    for (bool lazy : {false, true}) {
        const std::size_t cap = lazy ? 1 : RoughPath::default_max_pairs;
        const RoughPath a = shift(lift_piecewise_linear(z, 0.35, cap), 13);
        const RoughPath b = lift_piecewise_linear(tail(z, 13), 0.35, cap);
        EXPECT_LE(rough_distance(a, b), 1e-12);
        EXPECT_EQ(a.dense(), !lazy);
    }
}

TEST(WongZakai, LevelsAreLiftsOfCoarsenedPaths) {
    const auto z = sample_fbm(0.45, 2, uniform_grid(1.0, 64), 2);
    expect_kind(ErrorKind::invalid_parameter, [&] { wong_zakai_sequence(z, {3}, 0.4); });
    const auto levels = wong_zakai_sequence(z, {8, 4, 2, 1}, 0.4);
    ASSERT_EQ(levels.size(), 4u);
    EXPECT_EQ(rough_distance(levels[3], lift_piecewise_linear(z, 0.4)), 0.0);
    for (const auto& l : levels) EXPECT_LE(check_chen(l).residual, 1e-12);
    // The coarse level agrees with the data at coarse nodes.
    EXPECT_NEAR(levels[0].z(0, 8, 1), z.value(8, 1) - z.value(0, 1), 1e-14);
}

TEST(WongZakai, DistanceToFinestShrinksForMostSeeds) {
    int good = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto z = sample_fbm(0.45, 2, uniform_grid(1.0, 128), 40 + seed);
        const auto levels = wong_zakai_sequence(z, {8, 4, 2, 1}, 0.4);
        const double d8 = rough_distance(levels[0], levels[3]);
        const double d4 = rough_distance(levels[1], levels[3]);
        const double d2 = rough_distance(levels[2], levels[3]);
        if (d8 >= d4 && d4 >= d2) ++good;
    }
    EXPECT_GE(good, 6);
}

TEST(PathCsv, RoundTrip) {
    const auto z = sample_fbm(0.45, 2, uniform_grid(0.5, 10), 1);
    std::stringstream ss;
    write_csv(ss, z);
    const PathSamples back = read_path_csv(ss);
    EXPECT_EQ(back.values, z.values);
    EXPECT_EQ(back.grid.n, 10u);
    EXPECT_NEAR(back.grid.dt, z.grid.dt, 1e-15);
}

TEST(RoughPath, SubsampleKeepsStridePoints) {
    const PathSamples z = sample_fbm(0.45, 2, uniform_grid(2.0, 64), 3);
    const PathSamples s = subsample(z, 4);
    EXPECT_EQ(s.grid.n, 16u);
    EXPECT_DOUBLE_EQ(s.grid.dt, 4.0 * z.grid.dt);
    for (std::size_t i = 0; i <= 16; ++i)
        for (std::size_t a = 0; a < 2; ++a) EXPECT_EQ(s.value(i, a), z.value(4 * i, a));
    EXPECT_THROW(subsample(z, 5), Error);
}
