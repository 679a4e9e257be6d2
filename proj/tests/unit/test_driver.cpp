/// @file test_driver.cpp
/// @brief Transport operators, rough drivers, operator Chen relation, and norm reports.

#include "roughns/driver.hpp"
#include "roughns/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace roughns;

namespace {

DriverSet shear_set(std::size_t K, double c) {
    std::vector<TransportField> s;
    for (std::size_t k = 0; k < K; ++k) s.push_back(shear_transport(k, c));
    return DriverSet(std::move(s));
}

RoughPath fbm_lift(std::size_t K, std::size_t n, std::uint64_t seed, double H = 0.45) {
    return lift_piecewise_linear(sample_fbm(H, K, uniform_grid(1.0, n), seed), H - 0.05);
}

}  // namespace

TEST(Transport, ShearFieldsAreValid) {
    for (std::size_t k = 0; k < 3; ++k) {
        const TransportField t = shear_transport(k, 0.5);
        EXPECT_LE(divergence_residual(t.field()), 1e-15);
        EXPECT_NEAR(t.regularity_weight(), 2.0 * 2.0 * 0.5 / std::sqrt(2.0), 1e-12);
        EXPECT_FALSE(t.is_constant());
    }
    EXPECT_TRUE(constant_transport({0.7, 0.0, 0.0}).is_constant());
    const SpectralField grad = trig_field(Lattice(1), {1, 0, 0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 0.0});
    try {
        TransportField{grad};
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_parameter);
    }
}

TEST(TransportProperty, MatchesPaddedProduct) {
    const Lattice L(4);
    for (std::size_t k = 0; k < 3; ++k) {
        const TransportField t = shear_transport(k, 0.8);
        const SpectralField sig = restrict_to(t.field(), L);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const SpectralField phi = random_field(L, seed, 4, seed % 2 == 0, 1.0);
            EXPECT_LE(max_abs_diff(t.apply(phi), product_engine(L).advect(sig, phi)), 1e-13);
        }
    }
}

TEST(Driver, ZeroPathGivesZeroOperators) {
    const Lattice L(3);
    const DriverSet ds = shear_set(2, 1.0);
    const PathSamples z = make_samples(uniform_grid(1.0, 8), 2, [](double, std::size_t) { return 0.0; });
    const RoughPath rp = lift_piecewise_linear(z, 0.45);
    const RoughDriverEval d = build_driver(ds, rp, 1, 6);
    EXPECT_TRUE(d.is_zero());
    const SpectralField u = random_field(L, 1, 3, true, 1.0);
    EXPECT_EQ(sobolev_norm(d.a1(u), 0.0), 0.0);
    EXPECT_EQ(sobolev_norm(d.a2(u), 0.0), 0.0);
    const OperatorNorms n = driver_norms(d, L, 1.0);
    EXPECT_EQ(n.a1, 0.0);
    EXPECT_EQ(n.a2, 0.0);
}

TEST(Driver, ConstantFieldSymbol) {
    const Lattice L(3);
    const DriverSet ds({constant_transport({1.0, 0.0, 0.0})});
    const double c = 0.37;
    const RoughDriverEval d = driver_from_increments(ds, {c}, {0.5 * c * c});
    const SpectralField u = trig_field(L, {2, 1, 0}, {0.0, 0.0, 1.0}, {1.0, -2.0, 0.0});
    const SpectralField a = d.a1(u);
    for (std::size_t i = 0; i < L.size(); ++i)
        for (int comp = 0; comp < 3; ++comp) {
            const cplx expect = cplx(0.0, c * L.mode(i)[0]) * u[i][comp];
            EXPECT_NEAR(std::abs(a[i][comp] - expect), 0.0, 1e-15);
        }
    // Second level of a straight line: (c d_1)^2 / 2.
    const SpectralField a2 = d.a2(u);
    for (std::size_t i = 0; i < L.size(); ++i)
        for (int comp = 0; comp < 3; ++comp) {
            const double k1 = L.mode(i)[0];
            EXPECT_NEAR(std::abs(a2[i][comp] + 0.5 * c * c * k1 * k1 * u[i][comp]), 0.0, 1e-15);
        }
    // |A1|_{H^1 -> H^0} = |c| max |k1| / (1 + |k|^2)^{1/2} = |c| 3 / sqrt(10).
    EXPECT_NEAR(driver_norms(d, L, 0.0, 200).a1, c * 3.0 / std::sqrt(10.0), 1e-9);
}

TEST(Driver, DimensionMismatch) {
    const RoughPath rp = fbm_lift(2, 16, 1);
    try {
        build_driver(shear_set(3, 1.0), rp, 0, 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::incompatible_driver);
    }
    EXPECT_THROW(driver_from_increments(shear_set(2, 1.0), {1.0}, {0.0, 0.0, 0.0, 0.0}), Error);
}

TEST(DriverProperty, OperatorChenRelation) {
    const Lattice L(3);
    const DriverSet ds = shear_set(3, 0.6);
    const RoughPath rp = fbm_lift(3, 32, 5);
    const std::size_t triples[][3] = {{0, 5, 17}, {3, 4, 5}, {0, 16, 32}, {7, 7, 20}, {10, 30, 31}};
    for (const auto& tr : triples) {
        const RoughDriverEval ik = build_driver(ds, rp, tr[0], tr[2]);
        const RoughDriverEval jk = build_driver(ds, rp, tr[1], tr[2]);
        const RoughDriverEval ij = build_driver(ds, rp, tr[0], tr[1]);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const SpectralField phi = random_field(L, seed, 3, true, 1.0);
            const SpectralField defect = ik.a2(phi) - jk.a2(phi) - ij.a2(phi) - jk.a1(ij.a1(phi));
            EXPECT_LE(sobolev_norm(defect, 0.0), 1e-10 * sobolev_norm(phi, 0.0));
        }
    }
}

TEST(DriverProperty, AdjointsSkewnessAndSplitting) {
    const Lattice L(3);
    const DriverSet ds = shear_set(3, 0.9);
    const RoughPath rp = fbm_lift(3, 16, 2);
    const RoughDriverEval d = build_driver(ds, rp, 2, 11);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SpectralField u = random_field(L, seed, 3, true, 1.0);
        const SpectralField phi = random_field(L, seed + 40, 3, true, 1.0);
        const double scale = sobolev_norm(u, 2.0) * sobolev_norm(phi, 2.0);
        EXPECT_NEAR(inner(d.a1(u), phi), inner(u, d.a1_adjoint(phi)), 1e-12 * scale);
        EXPECT_NEAR(inner(d.a2(u), phi), inner(u, d.a2_adjoint(phi)), 1e-12 * scale);
        double zmax = 0.0;
        for (double v : d.z()) zmax = std::max(zmax, std::abs(v));
        EXPECT_LE(std::abs(inner(d.a1(u), u)) / zmax, 1e-10 * std::pow(sobolev_norm(u, 1.0), 2));
        const RoughDriverEval::Action act = d.apply(u);
        EXPECT_LE(max_abs_diff(act.p1, d.a1(u)), 1e-15);
        EXPECT_LE(max_abs_diff(act.p2, d.a2(u)), 1e-14);
        EXPECT_LE(divergence_residual(act.p1) + divergence_residual(act.p2), 1e-12);
        EXPECT_LE(sobolev_norm(leray_project(act.q1), 0.0) + sobolev_norm(leray_project(act.q2), 0.0), 1e-12);
    }
    const RoughDriverEval first = build_driver(ds, rp, 2, 11, 1);
    EXPECT_EQ(sobolev_norm(first.a2(random_field(L, 3, 3, true, 1.0)), 0.0), 0.0);
}

TEST(DriverBounds, HomogeneityUnderScaling) {
    const Lattice L(3);
    const DriverSet ds = shear_set(2, 1.0);
    const RoughPath rp = fbm_lift(2, 16, 7);
    const double c = 2.5;
    const RoughPath big = rp.scaled(c);
    for (double beta : {0.0, 1.0, 2.0}) {
        const OperatorNorms a = driver_norms(build_driver(ds, rp, 3, 12), L, beta);
        const OperatorNorms b = driver_norms(build_driver(ds, big, 3, 12), L, beta);
        EXPECT_NEAR(b.a1, c * a.a1, 1e-12 * b.a1);
        EXPECT_NEAR(b.a2, c * c * a.a2, 1e-12 * b.a2);
    }
}

TEST(DriverBounds, RatiosBoundedAcrossRefinements) {
    const Lattice L(3);
    const DriverSet ds = shear_set(2, 1.0);
    const PathSamples fine = sample_fbm(0.45, 2, uniform_grid(1.0, 64), 11);
    for (std::size_t f : {4u, 2u, 1u}) {
        const RoughPath rp = lift_piecewise_linear(coarsen(fine, f), 0.4);
        const DriverBoundsReport rep = driver_bounds(ds, rp, L, dyadic_windows(rp.grid().n, 3), 40);
        ASSERT_FALSE(rep.rows.empty());
        for (const DriverBoundRow& r : rep.rows) {
            // |A1| <= sum_k |Z^k| |P S_k| and |A2| <= sum_{lk} |ZZ^{lk}| |P S_k| |P S_l|.
            const auto b = static_cast<std::size_t>(r.beta);
            EXPECT_LE(r.ratio1, 2.0 * rep.m_hat[b] * 1.05);
            if (b < 2) EXPECT_LE(r.ratio2, 4.0 * rep.m_hat[b] * rep.m_hat[b + 1] * 1.05);
        }
    }
}

TEST(DriverBounds, DyadicWindows) {
    const auto w = dyadic_windows(8, 100);
    EXPECT_EQ(w.size(), 8u + 4u + 2u + 1u);
    EXPECT_EQ(w.back(), (std::pair<std::size_t, std::size_t>{0, 8}));
    EXPECT_EQ(dyadic_windows(1024, 2).size(), 2u * 10u + 1u);
}
