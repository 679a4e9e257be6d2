/// @file test_selection.cpp
/// @brief Ensembles, the energy order, Krylov functionals, selection, and the semigroup check.

#include "oracles.hpp"
#include "roughns/errors.hpp"
#include "roughns/selection.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace roughns;

namespace {

DriverSet shear_set(std::size_t K, double c) {
    std::vector<TransportField> s;
    for (std::size_t k = 0; k < K; ++k) s.push_back(shear_transport(k, c));
    return DriverSet(std::move(s));
}

double half_norm2(const SpectralField& u) {
    const double n = sobolev_norm(u, 0.0);
    return 0.5 * n * n;
}

struct Data {
    SpectralField u0;
    double E0 = 0.0;
    RoughPath rp;
    DriverSet ds;
    EnsembleConfig cfg;
};

Data make_data(std::uint64_t seed, std::size_t n = 32) {
    Data s;
    s.u0 = random_field(Lattice(3), 200 + seed, 2, true, 0.5);
    s.E0 = half_norm2(s.u0);
    s.rp = lift_piecewise_linear(sample_fbm(0.45, 2, uniform_grid(1.0, n), seed), 0.4);
    s.ds = shear_set(2, 0.2);
    s.cfg.solve.cutoff = 3;
    return s;
}

Ensemble build(const Data& s) { return build_ensemble(s.u0, s.E0, s.rp, s.ds, s.cfg); }

Variant dissipated(double eps, double t_begin = 0.0, double t_end = 1e300) {
    Variant v;
    v.extra = {eps, t_begin, t_end};
    return v;
}

bool same(const Trajectory& a, const Trajectory& b) {
    if (!(a.grid == b.grid) || a.E0 != b.E0 || a.E != b.E || a.energy != b.energy) return false;
    for (std::size_t i = 0; i < a.u.size(); ++i)
        if (max_abs_diff(a.u[i], b.u[i]) != 0.0) return false;
    return true;
}

Trajectory synthetic(double T, std::size_t n, const std::function<double(double)>& E) {
    Trajectory tr;
    tr.grid = uniform_grid(T, n);
    const Lattice L(1);
    for (std::size_t i = 0; i <= n; ++i) {
        tr.u.push_back(SpectralField(L));
        tr.E.push_back(E(tr.grid.time(i)));
        tr.energy.push_back(0.0);
    }
    tr.dissipation.assign(n, 0.0);
    tr.E0 = tr.E[0];
    return tr;
}

}  // namespace

TEST(Ensemble, SingleBaseWithoutClosureIsSingleton) {
    const Ensemble ens = build(make_data(1));
    ASSERT_EQ(ens.members.size(), 1u);
    EXPECT_TRUE(ens.members[0].certified);
    EXPECT_EQ(ens.members_at(0), std::vector<std::size_t>{0});
    const SelectionResult r = select(ens, default_specs(3));
    EXPECT_EQ(r.id, 0u);
    EXPECT_EQ(r.flag, SelectionFlag::unique);
    EXPECT_TRUE(is_admissible(ens, 0));
}

TEST(Ensemble, ShiftAndSelfConcatenation) {
    Data s = make_data(2);
    s.cfg.closure_steps = {8};
    const Ensemble ens = build(s);
    ASSERT_EQ(ens.members.size(), 3u);
    EXPECT_EQ(ens.members[1].offset, 8u);
    EXPECT_EQ(ens.members[2].offset, 0u);
    EXPECT_TRUE(same(ens.members[2].traj, ens.members[0].traj));
    EXPECT_TRUE(same(ens.members[1].traj, shift_traj(ens.members[0].traj, 8)));
    for (const Member& m : ens.members) EXPECT_TRUE(m.certified) << m.provenance;
    // Two identical members at offset 0.
    const SelectionResult r = select(ens, default_specs(4));
    EXPECT_EQ(r.id, 0u);
    EXPECT_EQ(r.flag, SelectionFlag::unique_up_to_tolerance);
}

TEST(Ensemble, DissipatedVariantIsDominatedAndSelected) {
    Data s = make_data(3);
    s.cfg.variants = {Variant{}, dissipated(0.1)};
    const Ensemble ens = build(s);
    ASSERT_EQ(ens.members.size(), 2u);
    const Trajectory& base = ens.member(0).traj;
    const Trajectory& damped = ens.member(1).traj;
    EXPECT_EQ(compare(damped, base), Order::dominated_1);
    EXPECT_EQ(compare(base, damped), Order::dominated_2);
    EXPECT_LT(damped.energy.back(), base.energy.back());
    const std::vector<FunctionalSpec> specs = default_specs(5);
    const SelectionResult r = select(ens, specs);
    EXPECT_EQ(r.id, 1u);
    EXPECT_EQ(r.flag, SelectionFlag::unique);
    EXPECT_LT(krylov_functional(damped, specs[0]).value, krylov_functional(base, specs[0]).value);
    EXPECT_TRUE(is_admissible(ens, 1));
    EXPECT_FALSE(is_admissible(ens, 0));
}

TEST(Ensemble, CrossingEnergiesAreIncomparable) {
    Data s = make_data(4);
    s.cfg.variants = {dissipated(0.2, 0.0, 0.25), dissipated(3.0, 0.5, 1.0)};
    const Ensemble ens = build(s);
    EXPECT_EQ(compare(ens.member(0).traj, ens.member(1).traj), Order::incomparable);
    EXPECT_TRUE(is_admissible(ens, 0));
    EXPECT_TRUE(is_admissible(ens, 1));
}

TEST(Ensemble, ClosureShiftsAreMembersOfShiftedEnsemble) {
    Data s = make_data(5);
    s.cfg.variants = {Variant{}, dissipated(0.1, 0.5, 1.0)};
    s.cfg.closure_steps = {8, 16};
    const Ensemble ens = build(s);
    for (std::size_t base : {0u, 1u})
        for (std::size_t T : {8u, 16u}) {
            const Trajectory expect = shift_traj(ens.member(base).traj, T);
            bool found = false;
            for (std::size_t id : ens.members_at(T)) found = found || same(ens.member(id).traj, expect);
            EXPECT_TRUE(found) << "base " << base << " T " << T;
        }
    for (const Member& m : ens.members) EXPECT_TRUE(m.certified) << m.provenance;
    std::ostringstream os;
    write_manifest(os, ens);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "id,provenance,offset,certified,E0,final_energy");
}

TEST(Ensemble, MemberCapIsReported) {
    Data s = make_data(6);
    s.cfg.closure_steps = {4, 8, 12};
    s.cfg.max_members = 3;
    const Ensemble ens = build(s);
    EXPECT_EQ(ens.members.size(), 3u);
    EXPECT_EQ(ens.dropped, 4u);
}

TEST(Continuation, ShiftAndConcatIdentities) {
    const Data s = make_data(7);
    SolveConfig cfg = s.cfg.solve;
    const Trajectory tr = solve(s.u0, s.E0, s.rp, s.ds, cfg);
    EXPECT_TRUE(same(shift_traj(tr, 0), tr));
    for (std::size_t T : {1u, 10u, 31u}) EXPECT_TRUE(same(concat(tr, T, shift_traj(tr, T)), tr));
    EXPECT_THROW(shift_traj(tr, 32), Error);
}

TEST(Continuation, IncompatibleContinuationsAreRejected) {
    const Data s = make_data(8);
    const Trajectory a = solve(s.u0, s.E0, s.rp, s.ds, s.cfg.solve);
    const SpectralField other = random_field(Lattice(3), 1, 2, true, 0.5);
    const Trajectory b = solve(other, half_norm2(other), s.rp, s.ds, s.cfg.solve);
    auto kind = [](const std::function<void()>& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::invalid_input;
    };
    EXPECT_EQ(kind([&] { concat(a, 10, shift_traj(b, 10)); }), ErrorKind::invalid_continuation);
    Trajectory rich = shift_traj(a, 10);
    rich.E0 = a.E_left(10) + 0.1;
    EXPECT_EQ(kind([&] { concat(a, 10, rich); }), ErrorKind::invalid_continuation);
    EXPECT_EQ(kind([&] { concat(a, 10, shift_traj(a, 11)); }), ErrorKind::invalid_continuation);
}

TEST(Continuation, RestartedConcatenationCertifies) {
    // traj1 on [0, T], then a fresh run from (u(T), E(T-)) with two substeps per step.
    const Data s = make_data(9, 64);
    const std::size_t T = 24;
    const Trajectory first = solve(s.u0, s.E0, s.rp, s.ds, s.cfg.solve);
    SolveConfig c2 = s.cfg.solve;
    c2.substeps = 2;
    const Trajectory second = solve(first.u[T], first.E_left(T), shift(s.rp, T), s.ds, c2);
    const Trajectory joined = concat(first, T, second);
    const CertificateReport rep = certify(joined, remainder(joined, s.rp, s.ds), s.rp, s.ds);
    EXPECT_TRUE(rep.all_pass());
    for (const auto& [a, b] : {std::pair<std::size_t, std::size_t>{20, 30}, {0, 64}, {23, 25}}) {
        const SpectralField direct = remainder_field(joined, s.rp, s.ds, a, b);
        const SpectralField chen = straddle_remainder(joined, s.rp, s.ds, a, T, b);
        EXPECT_LE(sobolev_norm(direct - chen, -3.0), 1e-12 * (1.0 + sobolev_norm(direct, -3.0)));
    }
}

TEST(Order, SelfEqualAndGridMismatch) {
    const Trajectory a = synthetic(1.0, 10, [](double t) { return 1.0 - 0.5 * t; });
    EXPECT_EQ(compare(a, a), Order::equal);
    const Trajectory b = synthetic(1.0, 20, [](double t) { return 1.0 - 0.5 * t; });
    try {
        compare(a, b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::incompatible);
    }
    EXPECT_EQ(to_string(Order::dominated_1), "dominated-1");
}

TEST(Krylov, ConstantEnergy) {
    const double E0 = 0.7, T = 5.0;
    const Trajectory tr = synthetic(T, 5000, [&](double) { return E0; });
    const KrylovValue v = krylov_functional(tr, FunctionalSpec{});
    EXPECT_NEAR(v.value, std::tanh(E0) * (1.0 - std::exp(-T)), 1e-7);
    EXPECT_NEAR(v.tail, std::exp(-T), 1e-15);
    const Trajectory zero = synthetic(T, 100, [](double) { return 0.0; });
    EXPECT_EQ(krylov_functional(zero, FunctionalSpec{}).value, 0.0);
}

TEST(Krylov, MatchesAdaptiveQuadrature) {
    const Trajectory tr = synthetic(10.0, 20000, [](double t) { return std::exp(-2.0 * t); });
    const double oracle_value =
        oracle::adaptive_simpson([](double t) { return std::exp(-t) * std::tanh(std::exp(-2.0 * t)); }, 0.0, 10.0, 1e-12);
    EXPECT_NEAR(krylov_functional(tr, FunctionalSpec{}).value, oracle_value, 1e-6);
    FunctionalSpec bad;
    bad.lambda = 0.0;
    EXPECT_THROW(krylov_functional(tr, bad), Error);
}

TEST(Krylov, ModeObservable) {
    // u = a e_1 for all t: F = tanh(a (2 pi)^{3/2}-free inner) = tanh(a).
    const Lattice L(2);
    const SpectralField e1 = mode_basis(L, 1);
    Trajectory tr = synthetic(2.0, 400, [](double) { return 0.3; });
    for (SpectralField& u : tr.u) u = 0.4 * e1;
    FunctionalSpec spec;
    spec.mode = 1;
    EXPECT_NEAR(krylov_functional(tr, spec).value, std::tanh(0.4) * (1.0 - std::exp(-2.0)), 1e-5);
}

TEST(Functionals, ModeBasisIsOrthonormalAndOrdered) {
    const Lattice L(2);
    std::vector<SpectralField> e;
    for (std::size_t n = 1; n <= 24; ++n) e.push_back(mode_basis(L, n));
    for (std::size_t a = 0; a < e.size(); ++a) {
        EXPECT_LE(divergence_residual(e[a]), 1e-15);
        EXPECT_LE(conjugate_symmetry_residual(e[a]), 1e-15);
        for (std::size_t b = 0; b < e.size(); ++b) EXPECT_NEAR(inner(e[a], e[b]), a == b ? 1.0 : 0.0, 1e-12);
    }
    // The first |k| = 1 representative in lexicographic order is (0, 0, 1).
    EXPECT_GT(std::abs(e[0].at({0, 0, 1})[0]) + std::abs(e[0].at({0, 0, 1})[1]), 0.0);
    // Modes 13..24 have |k|^2 = 2.
    for (std::size_t n = 12; n < 24; ++n) EXPECT_NEAR(sobolev_norm(e[n], 2.0), 3.0, 1e-12);
    EXPECT_THROW(mode_basis(L, 0), Error);
}

TEST(Functionals, DefaultEnumeration) {
    EXPECT_EQ(lambda_sequence(1), 1.0);
    EXPECT_EQ(lambda_sequence(2), 0.5);
    EXPECT_EQ(lambda_sequence(3), 2.0);
    EXPECT_DOUBLE_EQ(lambda_sequence(4), 1.0 / 3.0);
    EXPECT_EQ(lambda_sequence(5), 3.0);
    const std::vector<FunctionalSpec> s = default_specs(6);
    const std::pair<double, std::size_t> expect[] = {{1.0, 0}, {0.5, 0}, {1.0, 1}, {2.0, 0}, {0.5, 1}, {1.0, 2}};
    for (std::size_t q = 0; q < 6; ++q) {
        EXPECT_EQ(s[q].lambda, expect[q].first);
        EXPECT_EQ(s[q].mode, expect[q].second);
    }
}

TEST(Selection, ErrorsAndPreconditions) {
    const Ensemble ens = build(make_data(10));
    try {
        select_among(ens, {}, default_specs(2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_input);
    }
    FunctionalSpec wrong;
    wrong.lambda = 2.0;
    EXPECT_THROW(select(ens, {wrong}), Error);
}

TEST(SelectionProperty, ArgminInvariantUnderBetaChanges) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        Data s = make_data(20 + seed);
        s.cfg.variants = {Variant{}, dissipated(0.1), dissipated(0.05, 0.5, 1.0)};
        const Ensemble ens = build(s);
        std::vector<FunctionalSpec> specs = default_specs(4);
        const std::size_t ref = select(ens, specs).id;
        for (FunctionalSpec& f : specs) f.beta_scale = 3.0;
        EXPECT_EQ(select(ens, specs).id, ref);
        for (FunctionalSpec& f : specs) f.beta = BetaKind::atan;
        EXPECT_EQ(select(ens, specs).id, ref);
        EXPECT_TRUE(is_admissible(ens, ref));
    }
}

TEST(Selection, DeterministicTrace) {
    Data s = make_data(11);
    s.cfg.variants = {Variant{}, dissipated(0.1)};
    const std::vector<FunctionalSpec> specs = default_specs(3);
    const Ensemble a = build(s);
    const Ensemble b = build(s);
    std::ostringstream ta, tb;
    write_trace(ta, a, select(a, specs), specs);
    write_trace(tb, b, select(b, specs), specs);
    EXPECT_EQ(ta.str(), tb.str());
    EXPECT_EQ(ta.str().substr(0, ta.str().find('\n')), "selected=1");
}

TEST(Semigroup, SingletonShiftClosedEnsemble) {
    Data s = make_data(12);
    s.cfg.closure_steps = {8, 16};
    const Ensemble ens = build(s);
    const std::vector<FunctionalSpec> specs = default_specs(3);
    EXPECT_LE(semigroup_residual(ens, specs, 8, 8), 1e-8);
    EXPECT_LE(semigroup_residual(ens, specs, 8, 16), 1e-8);
    EXPECT_LE(semigroup_residual(ens, specs, 16, 16), 1e-8);
    EXPECT_LE(semigroup_residual(ens, specs, 8, 0), 1e-9);
    EXPECT_LE(semigroup_residual(ens, specs, 0, 5), 1e-9);
    EXPECT_THROW(semigroup_residual(ens, specs, 4, 4), Error);
}

TEST(Semigroup, DissipatedEnsembleClosedUnderShift) {
    Data s = make_data(13);
    s.cfg.variants = {Variant{}, dissipated(0.1, 0.5, 1.0)};
    s.cfg.closure_steps = {8};
    const Ensemble ens = build(s);
    EXPECT_LE(semigroup_residual(ens, default_specs(3), 8, 16), 1e-8);
}
