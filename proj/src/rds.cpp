#include "roughns/rds.hpp"

#include "roughns/errors.hpp"
#include "roughns/io.hpp"

#include <cmath>
#include <ostream>

namespace roughns {

NoisePoint::NoisePoint(const PathSamples& samples, std::size_t half, std::uint64_t seed)
    : values_(std::make_shared<const std::vector<double>>(samples.values)),
      dim_(samples.dim),
      dt_(samples.grid.dt),
      half_(half),
      seed_(seed),
      generator_(samples.generator),
      hurst_(samples.hurst) {
    samples.validate();
    if (half == 0 || samples.grid.n != 2 * half)
        throw Error(ErrorKind::invalid_input, "two-sided noise needs 2 half steps with half >= 1");
}

NoisePoint NoisePoint::sample_fbm(double H, std::size_t K, double dt, std::size_t half, std::uint64_t seed) {
    if (!(dt > 0.0)) throw Error(ErrorKind::invalid_parameter, "noise step must be positive");
    const TimeGrid g{-static_cast<double>(half) * dt, dt, 2 * half};
    return NoisePoint(roughns::sample_fbm(H, K, g, seed), half, seed);
}

std::size_t NoisePoint::absolute(std::ptrdiff_t i) const {
    const std::ptrdiff_t a = static_cast<std::ptrdiff_t>(half_) + offset_ + i;
    if (a < 0 || a > static_cast<std::ptrdiff_t>(2 * half_))
        throw Error(ErrorKind::horizon_exceeded, "noise index " + std::to_string(i) + " leaves the sampled horizon");
    return static_cast<std::size_t>(a);
}

double NoisePoint::increment(std::ptrdiff_t i, std::ptrdiff_t j, std::size_t a) const {
    const std::vector<double>& v = *values_;
    return v[absolute(j) * dim_ + a] - v[absolute(i) * dim_ + a];
}

PathSamples NoisePoint::window(std::ptrdiff_t start, std::size_t n) const {
    absolute(start + static_cast<std::ptrdiff_t>(n));
    PathSamples out;
    out.grid = TimeGrid{0.0, dt_, n};
    out.dim = dim_;
    out.generator = generator_;
    out.hurst = hurst_;
    out.values.resize((n + 1) * dim_);
    for (std::size_t m = 0; m <= n; ++m)
        for (std::size_t a = 0; a < dim_; ++a)
            out.values[m * dim_ + a] = increment(start, start + static_cast<std::ptrdiff_t>(m), a);
    return out;
}

NoisePoint NoisePoint::corrupted(std::ptrdiff_t i, std::size_t a, double delta) const {
    if (a >= dim_) throw Error(ErrorKind::invalid_parameter, "component out of range");
    NoisePoint out = *this;
    std::vector<double> v = *values_;
    v[absolute(i) * dim_ + a] += delta;
    out.values_ = std::make_shared<const std::vector<double>>(std::move(v));
    return out;
}

bool NoisePoint::operator==(const NoisePoint& o) const {
    if (dim_ != o.dim_ || dt_ != o.dt_ || half_ != o.half_ || offset_ != o.offset_) return false;
    return values_ == o.values_ || (values_ && o.values_ && *values_ == *o.values_);
}

NoisePoint theta(const NoisePoint& omega, std::ptrdiff_t s) {
    const std::ptrdiff_t off = omega.offset_ + s;
    if (off < -static_cast<std::ptrdiff_t>(omega.half_) || off > static_cast<std::ptrdiff_t>(omega.half_))
        throw Error(ErrorKind::horizon_exceeded, "shift moves the origin outside the sampled horizon");
    NoisePoint out = omega;
    out.offset_ = off;
    return out;
}

RpCocycleResidual cocycle_check_rp(const NoisePoint& omega, const NoisePoint& shifted, std::size_t s, std::size_t t,
                                   double alpha) {
    if (t == 0) return {};
    const RoughPath full = lift_piecewise_linear(omega.window(0, s + t), alpha);
    const RoughPath tail = lift_piecewise_linear(shifted.window(0, t), alpha);
    const std::size_t K = omega.dim();
    std::vector<double> z1(K), zz1(K * K), z2(K), zz2(K * K);
    RpCocycleResidual r;
    double worst = -1.0;
    for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = i + 1; j <= t; ++j) {
            full.pair(s + i, s + j, z1, zz1);
            tail.pair(i, j, z2, zz2);
            double dz = 0.0, dzz = 0.0;
            for (std::size_t a = 0; a < K; ++a) dz = std::max(dz, std::abs(z1[a] - z2[a]));
            for (std::size_t q = 0; q < K * K; ++q) dzz = std::max(dzz, std::abs(zz1[q] - zz2[q]));
            r.z = std::max(r.z, dz);
            r.zz = std::max(r.zz, dzz);
            if (std::max(dz, dzz) > worst) {
                worst = std::max(dz, dzz);
                r.i = i;
                r.j = j;
            }
        }
    return r;
}

RpCocycleResidual cocycle_check_rp(const NoisePoint& omega, std::size_t s, std::size_t t, double alpha) {
    return cocycle_check_rp(omega, theta(omega, static_cast<std::ptrdiff_t>(s)), s, t, alpha);
}

State phi(std::size_t t, const NoisePoint& omega, const SpectralField& u0, double E0, const PhiConfig& cfg) {
    if (t > cfg.steps) throw Error(ErrorKind::horizon_exceeded, "evaluation time beyond the ensemble horizon");
    const RoughPath rp = lift_piecewise_linear(omega.window(0, cfg.steps), cfg.alpha);
    const Ensemble ens = build_ensemble(u0, E0, rp, cfg.drivers, cfg.ensemble);
    const Trajectory& tr = ens.member(select(ens, cfg.specs, 0, cfg.tol_sel).id).traj;
    return {tr.u[t], tr.E_left(t)};
}

double cocycle_residual_phi(std::size_t s, std::size_t t, const NoisePoint& omega, const SpectralField& u0, double E0,
                            const PhiConfig& cfg) {
    const State lhs = phi(s + t, omega, u0, E0, cfg);
    const State mid = phi(s, omega, u0, E0, cfg);
    const State rhs = phi(t, theta(omega, static_cast<std::ptrdiff_t>(s)), mid.u, mid.E, cfg);
    return sobolev_norm(lhs.u - rhs.u, -1.0) + std::abs(lhs.E - rhs.E);
}

void write_csv(std::ostream& os, const std::vector<CocycleRow>& rows) {
    os << "seed,s,t,residual_Z,residual_ZZ,residual_phi\n";
    for (const CocycleRow& r : rows)
        os << r.seed << ',' << format_double(r.s) << ',' << format_double(r.t) << ',' << format_double(r.residual_z)
           << ',' << format_double(r.residual_zz) << ',' << format_double(r.residual_phi) << '\n';
}

}  // namespace roughns
