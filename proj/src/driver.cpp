#include "roughns/driver.hpp"

#include "roughns/errors.hpp"

#include <algorithm>
#include <cmath>

namespace roughns {

TransportField::TransportField(const SpectralField& sigma) : sigma_(sigma) {
    if (!sigma.is_finite()) throw Error(ErrorKind::invalid_parameter, "transport field has non-finite coefficients");
    double scale = 0.0;
    for (std::size_t i = 0; i < sigma.size(); ++i)
        for (const cplx& x : sigma[i]) scale = std::max(scale, std::abs(x));
    const double tol = 1e-12 * (1.0 + scale);
    if (conjugate_symmetry_residual(sigma) > tol)
        throw Error(ErrorKind::invalid_parameter, "transport field is not real");
    if (divergence_residual(sigma) > tol)
        throw Error(ErrorKind::invalid_parameter, "transport field is not divergence-free");
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const Vec3c& s = sigma[i];
        const double mag = std::sqrt(std::norm(s[0]) + std::norm(s[1]) + std::norm(s[2]));
        if (mag == 0.0) continue;
        modes_.push_back(sigma.lattice().mode(i));
        coeffs_.push_back(s);
        weight_ += mag * (1.0 + sigma.lattice().k2(i));
    }
}

void TransportField::apply_add(const SpectralField& phi, double c, SpectralField& out) const {
    if (c == 0.0) return;
    const Lattice& src = phi.lattice();
    const Lattice& dst = out.lattice();
    for (std::size_t iq = 0; iq < src.size(); ++iq) {
        const Vec3c& f = phi[iq];
        if (f[0] == 0.0 && f[1] == 0.0 && f[2] == 0.0) continue;
        const Mode& q = src.mode(iq);
        for (std::size_t m = 0; m < modes_.size(); ++m) {
            const Mode& p = modes_[m];
            const Mode k{p[0] + q[0], p[1] + q[1], p[2] + q[2]};
            if (!dst.contains(k)) continue;
            const Vec3c& s = coeffs_[m];
            const cplx sq = s[0] * static_cast<double>(q[0]) + s[1] * static_cast<double>(q[1]) +
                            s[2] * static_cast<double>(q[2]);
            const cplx w = cplx(0.0, c) * sq;
            Vec3c& o = out.at(k);
            for (int a = 0; a < 3; ++a) o[a] += w * f[a];
        }
    }
}

SpectralField TransportField::apply(const SpectralField& phi) const {
    SpectralField out(phi.lattice());
    apply_add(phi, 1.0, out);
    return out;
}

TransportField constant_transport(const std::array<double, 3>& c) {
    return TransportField(trig_field(Lattice(1), {0, 0, 0}, c, {0.0, 0.0, 0.0}));
}

TransportField shear_transport(std::size_t k, double c) {
    const Lattice L(1);
    switch (k % 3) {
        case 0: return TransportField(trig_field(L, {0, 0, 1}, {0.0, c, 0.0}, {c, 0.0, 0.0}));
        case 1: return TransportField(trig_field(L, {1, 0, 0}, {0.0, 0.0, c}, {0.0, c, 0.0}));
        default: return TransportField(trig_field(L, {0, 1, 0}, {c, 0.0, 0.0}, {0.0, 0.0, c}));
    }
}

DriverSet::DriverSet(std::vector<TransportField> sigmas)
    : sigmas_(std::make_shared<const std::vector<TransportField>>(std::move(sigmas))) {}

// ---------------------------------------------------------------------------

RoughDriverEval::RoughDriverEval(const DriverSet& ds, std::vector<double> z, std::vector<double> zz, int order)
    : ds_(ds), z_(std::move(z)), zz_(std::move(zz)), order_(order) {
    const std::size_t K = ds.dim();
    if (z_.size() != K || zz_.size() != K * K)
        throw Error(ErrorKind::incompatible_driver, "rough path dimension does not match the number of transport fields");
    if (order_ != 1 && order_ != 2) throw Error(ErrorKind::invalid_parameter, "driver order must be 1 or 2");
}

bool RoughDriverEval::is_zero() const {
    const bool z0 = std::all_of(z_.begin(), z_.end(), [](double v) { return v == 0.0; });
    const bool zz0 = order_ == 1 || std::all_of(zz_.begin(), zz_.end(), [](double v) { return v == 0.0; });
    return z0 && zz0;
}

RoughDriverEval::Action RoughDriverEval::apply(const SpectralField& u) const {
    const Lattice& L = u.lattice();
    const std::size_t K = ds_.dim();
    Action out{SpectralField(L), SpectralField(L), SpectralField(L), SpectralField(L)};
    std::vector<SpectralField> y;
    y.reserve(K);
    SpectralField s1(L);
    for (std::size_t l = 0; l < K; ++l) {
        const SpectralField s = ds_.sigma(l).apply(u);
        y.push_back(leray_project(s));
        s1.axpy(z_[l], s);
    }
    out.p1 = leray_project(s1);
    out.q1 = s1 - out.p1;
    if (order_ == 2) {
        SpectralField r(L);
        for (std::size_t k = 0; k < K; ++k) {
            SpectralField w(L);
            bool any = false;
            for (std::size_t l = 0; l < K; ++l) {
                const double c = zz_[l * K + k];
                if (c == 0.0) continue;
                w.axpy(c, y[l]);
                any = true;
            }
            if (any) ds_.sigma(k).apply_add(w, 1.0, r);
        }
        out.p2 = leray_project(r);
        out.q2 = r - out.p2;
    }
    return out;
}

SpectralField RoughDriverEval::a1(const SpectralField& u) const {
    SpectralField s(u.lattice());
    for (std::size_t l = 0; l < ds_.dim(); ++l) ds_.sigma(l).apply_add(u, z_[l], s);
    return leray_project(s);
}

SpectralField RoughDriverEval::a2(const SpectralField& u) const {
    const Lattice& L = u.lattice();
    SpectralField r(L);
    if (order_ == 1) return r;
    const std::size_t K = ds_.dim();
    std::vector<SpectralField> y;
    for (std::size_t l = 0; l < K; ++l) y.push_back(leray_project(ds_.sigma(l).apply(u)));
    for (std::size_t k = 0; k < K; ++k) {
        SpectralField w(L);
        for (std::size_t l = 0; l < K; ++l) w.axpy(zz_[l * K + k], y[l]);
        ds_.sigma(k).apply_add(w, 1.0, r);
    }
    return leray_project(r);
}

SpectralField RoughDriverEval::a1_adjoint(const SpectralField& phi) const { return -1.0 * a1(phi); }

SpectralField RoughDriverEval::a2_adjoint(const SpectralField& phi) const {
    // Same structure as a2 with the roles of the inner and outer index exchanged.
    const Lattice& L = phi.lattice();
    SpectralField r(L);
    if (order_ == 1) return r;
    const std::size_t K = ds_.dim();
    std::vector<SpectralField> y;
    for (std::size_t k = 0; k < K; ++k) y.push_back(leray_project(ds_.sigma(k).apply(phi)));
    for (std::size_t l = 0; l < K; ++l) {
        SpectralField w(L);
        for (std::size_t k = 0; k < K; ++k) w.axpy(zz_[l * K + k], y[k]);
        ds_.sigma(l).apply_add(w, 1.0, r);
    }
    return leray_project(r);
}

RoughDriverEval build_driver(const DriverSet& ds, const RoughPath& rp, std::size_t i, std::size_t j, int order) {
    if (rp.dim() != ds.dim())
        throw Error(ErrorKind::incompatible_driver, "rough path dimension does not match the number of transport fields");
    if (i > j || j > rp.grid().n) throw Error(ErrorKind::invalid_interval, "driver window needs i <= j <= n");
    std::vector<double> z(rp.dim()), zz(rp.dim() * rp.dim());
    rp.pair(i, j, z, zz);
    return RoughDriverEval(ds, std::move(z), std::move(zz), order);
}

RoughDriverEval driver_from_increments(const DriverSet& ds, std::vector<double> z, std::vector<double> zz,
                                       int order) {
    return RoughDriverEval(ds, std::move(z), std::move(zz), order);
}

// ---------------------------------------------------------------------------

namespace {

template <class Forward, class Adjoint>
double power_norm(const Lattice& L, const Forward& fwd, const Adjoint& adj, int iterations, std::uint64_t seed) {
    SpectralField x = random_field(L, seed, L.cutoff(), true, 1.0);
    x.at({0, 0, 0}) = Vec3c{};
    double est = 0.0;
    for (int it = 0; it < iterations; ++it) {
        const double nx = sobolev_norm(x, 0.0);
        if (nx == 0.0) break;
        x *= 1.0 / nx;
        const SpectralField y = fwd(x);
        est = std::max(est, sobolev_norm(y, 0.0));
        if (est == 0.0) break;
        x = adj(y);
    }
    return est;
}

}  // namespace

OperatorNorms driver_norms(const RoughDriverEval& d, const Lattice& L, double beta, int iterations, std::uint64_t seed) {
    OperatorNorms out;
    out.a1 = power_norm(
        L, [&](const SpectralField& x) { return bessel_potential(d.a1(bessel_potential(x, -beta - 1.0)), beta); },
        [&](const SpectralField& y) {
            return bessel_potential(d.a1_adjoint(bessel_potential(y, beta)), -beta - 1.0);
        },
        iterations, seed);
    if (d.order() == 2)
        out.a2 = power_norm(
            L, [&](const SpectralField& x) { return bessel_potential(d.a2(bessel_potential(x, -beta - 2.0)), beta); },
            [&](const SpectralField& y) {
                return bessel_potential(d.a2_adjoint(bessel_potential(y, beta)), -beta - 2.0);
            },
            iterations, seed);
    return out;
}

DriverBoundsReport driver_bounds(const DriverSet& ds, const RoughPath& rp, const Lattice& L,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& windows, int iterations) {
    if (rp.dim() != ds.dim())
        throw Error(ErrorKind::incompatible_driver, "rough path dimension does not match the number of transport fields");
    DriverBoundsReport rep;
    const HolderNorms h = holder_norms(rp);
    rep.R = std::max(h.z, std::sqrt(h.zz));
    const std::size_t K = ds.dim();
    for (int b = 0; b < 3; ++b)
        for (std::size_t k = 0; k < K; ++k) {
            std::vector<double> z(K, 0.0), zz(K * K, 0.0);
            z[k] = 1.0;
            const RoughDriverEval unit(ds, z, zz, 1);
            rep.m_hat[static_cast<std::size_t>(b)] =
                std::max(rep.m_hat[static_cast<std::size_t>(b)], driver_norms(unit, L, b, iterations).a1);
        }
    const double alpha = rp.alpha();
    for (const auto& [i, j] : windows) {
        const RoughDriverEval d = build_driver(ds, rp, i, j, 2);
        const double wz = std::pow(rp.grid().time(j) - rp.grid().time(i), alpha) * rep.R;
        for (int b = 0; b < 3; ++b) {
            const OperatorNorms nrm = driver_norms(d, L, b, iterations);
            DriverBoundRow row{i, j, static_cast<double>(b), nrm.a1, nrm.a2, 0.0, 0.0};
            if (wz > 0.0) {
                row.ratio1 = nrm.a1 / wz;
                row.ratio2 = nrm.a2 / (wz * wz);
            }
            rep.max_ratio1 = std::max(rep.max_ratio1, row.ratio1);
            rep.max_ratio2 = std::max(rep.max_ratio2, row.ratio2);
            rep.rows.push_back(row);
        }
    }
    return rep;
}

std::vector<std::pair<std::size_t, std::size_t>> dyadic_windows(std::size_t n, std::size_t max_per_level) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t len = 1; len <= n; len *= 2) {
        const std::size_t count = n / len;
        const std::size_t stride = std::max<std::size_t>(1, count / std::max<std::size_t>(1, max_per_level));
        for (std::size_t m = 0, taken = 0; m < count && taken < max_per_level; m += stride, ++taken)
            out.emplace_back(m * len, (m + 1) * len);
    }
    return out;
}

}  // namespace roughns
