#include "roughns/solver.hpp"

#include "roughns/errors.hpp"
#include "roughns/io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace roughns {

RoughScheme parse_scheme(const std::string& name) {
    if (name == "exponential") return RoughScheme::exponential;
    if (name == "davie") return RoughScheme::davie;
    throw Error(ErrorKind::invalid_parameter, "unknown rough scheme '" + name + "'");
}

std::string to_string(RoughScheme s) { return s == RoughScheme::exponential ? "exponential" : "davie"; }

ConvectionScheme parse_convection(const std::string& name) {
    if (name == "explicit") return ConvectionScheme::explicit_euler;
    if (name == "midpoint") return ConvectionScheme::midpoint;
    throw Error(ErrorKind::invalid_parameter, "unknown convection scheme '" + name + "'");
}

std::string to_string(ConvectionScheme s) { return s == ConvectionScheme::explicit_euler ? "explicit" : "midpoint"; }

void SolveConfig::validate() const {
    if (cutoff < 1) throw Error(ErrorKind::invalid_parameter, "cutoff must be at least 1");
    if (substeps < 1) throw Error(ErrorKind::invalid_parameter, "substeps must be at least 1");
    if (order != 1 && order != 2) throw Error(ErrorKind::invalid_parameter, "driver order must be 1 or 2");
    if (!(extra.eps >= 0.0) || !std::isfinite(extra.eps))
        throw Error(ErrorKind::invalid_parameter, "extra dissipation must be nonnegative");
    if (!(blowup_factor > 1.0)) throw Error(ErrorKind::invalid_parameter, "blow-up factor must exceed 1");
}

double energy_tolerance(double E0) { return 1e-6 * (1.0 + E0); }

namespace {

double max_coeff(const SpectralField& f) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        for (const cplx& x : f[i]) m = std::max(m, std::abs(x));
    return m;
}

// Omega x with Omega = sum_k z^k P S_k + sum_{l,k} anti^{lk} P S_k P S_l.
SpectralField omega_apply(const DriverSet& ds, std::span<const double> z, const std::vector<double>& anti,
                          bool second, const SpectralField& x) {
    const Lattice& L = x.lattice();
    const std::size_t K = ds.dim();
    SpectralField first(L), outer(L);
    std::vector<SpectralField> y;
    y.reserve(K);
    for (std::size_t l = 0; l < K; ++l) {
        y.push_back(leray_project(ds.sigma(l).apply(x)));
        first.axpy(z[l], y[l]);
    }
    if (!second) return first;
    bool any = false;
    for (std::size_t k = 0; k < K; ++k) {
        SpectralField w(L);
        bool used = false;
        for (std::size_t l = 0; l < K; ++l) {
            const double c = anti[l * K + k];
            if (c == 0.0) continue;
            w.axpy(c, y[l]);
            used = true;
        }
        if (used) {
            ds.sigma(k).apply_add(w, 1.0, outer);
            any = true;
        }
    }
    if (any) first += leray_project(outer);
    return first;
}

}  // namespace

SpectralField rough_increment(const RoughDriverEval& d, const SpectralField& v, RoughScheme scheme) {
    if (d.is_zero()) return v;
    if (scheme == RoughScheme::davie) {
        SpectralField out = v + d.a1(v);
        if (d.order() == 2) out += d.a2(v);
        return out;
    }
    const std::size_t K = d.drivers().dim();
    std::vector<double> anti(K * K, 0.0);
    bool second = false;
    if (d.order() == 2)
        for (std::size_t a = 0; a < K; ++a)
            for (std::size_t b = 0; b < K; ++b) {
                anti[a * K + b] = 0.5 * (d.zz()[a * K + b] - d.zz()[b * K + a]);
                second = second || anti[a * K + b] != 0.0;
            }
    SpectralField out = v, term = v;
    const double scale = max_coeff(v);
    if (scale == 0.0) return out;
    for (int n = 1; n <= 200; ++n) {
        term = omega_apply(d.drivers(), d.z(), anti, second, term);
        term *= 1.0 / n;
        out += term;
        const double t = max_coeff(term);
        if (t <= 1e-17 * std::max(scale, max_coeff(out))) return out;
        if (!std::isfinite(t)) break;
    }
    throw Error(ErrorKind::blow_up, "rough exponential series did not converge");
}

StepOutput advance(const SpectralField& u, const RoughDriverEval& d, double h, double nu, RoughScheme scheme,
                   ConvectionScheme convection, bool with_pressure) {
    StepOutput out;
    const Convection b = convection_parts(u);
    SpectralField v = u;
    v.axpy(-h, b.p);
    if (convection == ConvectionScheme::midpoint) {
        const double scale = std::max(max_coeff(u), 1e-300);
        bool done = false;
        for (int it = 0; it < 100 && !done; ++it) {
            SpectralField next = u;
            next.axpy(-h, roughns::convection(0.5 * (u + v)));
            done = max_abs_diff(next, v) <= 1e-15 * scale;
            v = std::move(next);
        }
        if (!done || !v.is_finite()) throw Error(ErrorKind::blow_up, "midpoint convection iteration did not converge");
    }
    v = rough_increment(d, v, scheme);
    out.u = heat_propagate(v, h, nu);
    // int_0^h |grad e^{r nu Delta} v|^2 dr, mode by mode.
    const Lattice& L = u.lattice();
    double diss = 0.0;
    for (std::size_t i = 0; i < L.size(); ++i) {
        const double k2 = L.k2(i);
        if (k2 == 0.0) continue;
        const double m2 = std::norm(v[i][0]) + std::norm(v[i][1]) + std::norm(v[i][2]);
        diss += m2 * (-std::expm1(-2.0 * nu * k2 * h)) / (2.0 * nu);
    }
    out.dissipation = torus_volume * diss;
    if (!with_pressure) return out;
    out.pressure = -h * b.q;
    if (!d.is_zero()) {
        const RoughDriverEval::Action act = d.apply(u);
        out.pressure += act.q1;
        out.pressure += act.q2;
    }
    return out;
}

SpectralField step(const SpectralField& u, const RoughDriverEval& d, double h, const SolveConfig& cfg) {
    return advance(u, d, h, 1.0, cfg.scheme, cfg.convection, false).u;
}

void subdivide_increment(std::span<const double> z, std::span<const double> zz, std::size_t m,
                         std::vector<double>& sub_z, std::vector<double>& sub_zz) {
    const std::size_t K = z.size();
    sub_z.assign(z.begin(), z.end());
    sub_zz.assign(zz.begin(), zz.end());
    if (m == 1) return;
    const double inv = 1.0 / static_cast<double>(m);
    for (double& v : sub_z) v *= inv;
    for (std::size_t a = 0; a < K; ++a)
        for (std::size_t b = 0; b < K; ++b)
            sub_zz[a * K + b] = 0.5 * sub_z[a] * sub_z[b] + 0.5 * (zz[a * K + b] - zz[b * K + a]) * inv;
}

double Trajectory::dissipation_until(std::size_t i) const {
    double s = 0.0;
    for (std::size_t l = 0; l < i; ++l) s += dissipation[l];
    return s;
}

Trajectory solve(const SpectralField& u0_in, double E0, const RoughPath& rp, const DriverSet& ds,
                 const SolveConfig& cfg) {
    cfg.validate();
    if (rp.dim() != ds.dim())
        throw Error(ErrorKind::incompatible_driver, "rough path dimension does not match the number of transport fields");
    const Lattice L(cfg.cutoff);
    const SpectralField u0 = u0_in.lattice().cutoff() == cfg.cutoff ? u0_in : restrict_to(u0_in, L);
    if (!u0.is_finite()) throw Error(ErrorKind::invalid_data, "initial velocity has non-finite coefficients");
    const double norm0 = sobolev_norm(u0, 0.0);
    if (divergence_residual(u0) > 1e-10 * (1.0 + max_coeff(u0)) || conjugate_symmetry_residual(u0) > 1e-12 * (1.0 + max_coeff(u0)))
        throw Error(ErrorKind::invalid_data, "initial velocity must be real and divergence-free");
    if (!(E0 >= 0.0) || !std::isfinite(E0) || 0.5 * norm0 * norm0 > E0 * (1.0 + 1e-12))
        throw Error(ErrorKind::invalid_data, "initial data outside the admissible cone: 1/2|u0|^2 > E0");

    const TimeGrid& g = rp.grid();
    Trajectory tr;
    tr.grid = g;
    tr.E0 = E0;
    tr.u.reserve(g.n + 1);
    tr.u.push_back(u0);
    tr.E.push_back(E0);
    tr.energy.push_back(0.5 * norm0 * norm0);
    if (cfg.keep_pressure) tr.pressure.push_back(SpectralField(L));
    tr.dissipation.reserve(g.n);

    const std::size_t m = cfg.substeps;
    const double h = g.dt / static_cast<double>(m);
    std::vector<double> sz, szz;
    for (std::size_t l = 0; l < g.n; ++l) {
        subdivide_increment(rp.step_z(l), rp.step_zz(l), m, sz, szz);
        const RoughDriverEval d = driver_from_increments(ds, sz, szz, cfg.order);
        SpectralField u = tr.u.back();
        SpectralField dpi(L);
        double diss = 0.0;
        for (std::size_t s = 0; s < m; ++s) {
            const double t = g.time(l) + static_cast<double>(s) * h;
            const double nu = (t >= cfg.extra.t_begin && t < cfg.extra.t_end) ? 1.0 + cfg.extra.eps : 1.0;
            StepOutput o = advance(u, d, h, nu, cfg.scheme, cfg.convection, cfg.keep_pressure);
            u = std::move(o.u);
            diss += o.dissipation;
            if (cfg.keep_pressure) dpi += o.pressure;
        }
        const double nrm = sobolev_norm(u, 0.0);
        if (!u.is_finite() || !std::isfinite(nrm))
            throw BlowUp(l + 1, "non-finite coefficients at step " + std::to_string(l + 1));
        if (norm0 > 0.0 && nrm > cfg.blowup_factor * norm0)
            throw BlowUp(l + 1, "velocity norm exceeded the blow-up threshold at step " + std::to_string(l + 1));
        const double en = 0.5 * nrm * nrm;
        tr.energy.push_back(en);
        tr.E.push_back(std::min(tr.E.back(), en));
        tr.dissipation.push_back(diss);
        if (cfg.keep_pressure) tr.pressure.push_back(tr.pressure.back() + dpi);
        tr.u.push_back(std::move(u));
    }
    return tr;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,E,energy_l2,diss_cum\n";
    double cum = 0.0;
    for (std::size_t i = 0; i <= traj.grid.n; ++i) {
        if (i > 0) cum += traj.dissipation[i - 1];
        os << format_double(traj.grid.time(i)) << ',' << format_double(traj.E[i]) << ','
           << format_double(traj.energy[i]) << ',' << format_double(cum) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Remainders

namespace {

// Prefix sums C_i of the trapezoid rule for G = B_P(u) - Delta u, plus u_i + C_i.
std::vector<SpectralField> drift_prefix(const Trajectory& traj) {
    const std::size_t n = traj.grid.n;
    std::vector<SpectralField> G;
    G.reserve(n + 1);
    for (const SpectralField& u : traj.u) G.push_back(convection(u) - laplacian(u));
    std::vector<SpectralField> base;
    base.reserve(n + 1);
    SpectralField C(traj.u[0].lattice());
    base.push_back(traj.u[0] + C);
    for (std::size_t l = 0; l < n; ++l) {
        C.axpy(0.5 * traj.grid.dt, G[l]);
        C.axpy(0.5 * traj.grid.dt, G[l + 1]);
        base.push_back(traj.u[l + 1] + C);
    }
    return base;
}

void check_compat(const Trajectory& traj, const RoughPath& rp, const DriverSet& ds) {
    if (!(traj.grid == rp.grid())) throw Error(ErrorKind::incompatible, "trajectory and rough path grids differ");
    if (rp.dim() != ds.dim())
        throw Error(ErrorKind::incompatible_driver, "rough path dimension does not match the number of transport fields");
}

struct RowTerms {
    std::vector<SpectralField> y;   // P S_l u_i
    std::vector<SpectralField> w;   // P S_k P S_l u_i at l * K + k
};

RowTerms row_terms(const DriverSet& ds, const SpectralField& u) {
    const std::size_t K = ds.dim();
    RowTerms t;
    for (std::size_t l = 0; l < K; ++l) t.y.push_back(leray_project(ds.sigma(l).apply(u)));
    for (std::size_t l = 0; l < K; ++l)
        for (std::size_t k = 0; k < K; ++k) t.w.push_back(leray_project(ds.sigma(k).apply(t.y[l])));
    return t;
}

}  // namespace

SpectralField remainder_field(const Trajectory& traj, const RoughPath& rp, const DriverSet& ds, std::size_t i,
                              std::size_t j) {
    check_compat(traj, rp, ds);
    if (i > j || j > traj.grid.n) throw Error(ErrorKind::invalid_interval, "remainder window needs i <= j <= n");
    SpectralField r = traj.u[j] - traj.u[i];
    for (std::size_t l = i; l < j; ++l) {
        r.axpy(0.5 * traj.grid.dt, convection(traj.u[l]) - laplacian(traj.u[l]));
        r.axpy(0.5 * traj.grid.dt, convection(traj.u[l + 1]) - laplacian(traj.u[l + 1]));
    }
    const RoughDriverEval d = build_driver(ds, rp, i, j, 2);
    r -= d.a1(traj.u[i]);
    r -= d.a2(traj.u[i]);
    return r;
}

double RemainderLedger::max_one_step() const {
    double m = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) m = std::max(m, natural(i, i + 1));
    return m;
}

RemainderLedger remainder(const Trajectory& traj, const RoughPath& rp, const DriverSet& ds,
                          const std::vector<SpectralField>& probes_in, std::size_t window) {
    check_compat(traj, rp, ds);
    const Lattice& L = traj.u[0].lattice();
    std::vector<SpectralField> probes;
    std::vector<double> probe_norm;
    for (const SpectralField& f : probes_in) {
        const SpectralField phi = f.lattice().cutoff() == L.cutoff() ? f : restrict_to(f, L);
        const double n3 = phi.is_finite() ? sobolev_norm(phi, 3.0) : std::numeric_limits<double>::infinity();
        if (!std::isfinite(n3) || !(n3 > 0.0))
            throw Error(ErrorKind::invalid_probe, "probe is not a nonzero H^3 field");
        probes.push_back(phi);
        probe_norm.push_back(n3);
    }

    const std::size_t n = traj.grid.n;
    RemainderLedger led;
    led.grid = traj.grid;
    led.p = 1.0 / rp.alpha();
    led.window = window == 0 ? n : std::min(window, n);
    led.natural = TwoIndexMap(traj.grid);
    led.sharp = TwoIndexMap(traj.grid);
    led.probe_sup = TwoIndexMap(traj.grid);
    led.has_probes = !probes.empty();

    const std::vector<SpectralField> base = drift_prefix(traj);
    const std::size_t K = ds.dim();
    std::vector<double> z(K), zz(K * K);
    std::vector<double> scratch;
    for (std::size_t i = 0; i < n; ++i) {
        const RowTerms t = row_terms(ds, traj.u[i]);
        const std::size_t last = std::min(n, i + led.window);
        for (std::size_t j = i + 1; j <= last; ++j) {
            rp.pair(i, j, z, zz);
            SpectralField a2(L);
            for (std::size_t q = 0; q < K * K; ++q) a2.axpy(zz[q], t.w[q]);
            SpectralField r = base[j] - base[i];
            for (std::size_t l = 0; l < K; ++l) r.axpy(-z[l], t.y[l]);
            const SpectralField sharp = r;
            r -= a2;
            led.natural.at(i, j) = sobolev_norm(r, -3.0);
            led.sharp.at(i, j) = sobolev_norm(sharp, -2.0);
            double ps = 0.0;
            for (std::size_t q = 0; q < probes.size(); ++q)
                ps = std::max(ps, std::abs(inner(r, probes[q])) / probe_norm[q]);
            led.probe_sup.at(i, j) = ps;
        }
    }
    const std::size_t w = led.window;
    led.omega = control_from_variation(led.natural, led.p / 3.0,
                                       [w](std::size_t i, std::size_t j) { return j - i <= w; });
    return led;
}

// ---------------------------------------------------------------------------
// Certificates

double varpi(double m_hat, double R, double alpha, double span) {
    return span * std::pow(m_hat * R, 1.0 / alpha) + span;
}

namespace {

void note(ClauseResult& c, double v, std::size_t i, std::size_t j) {
    if (v > c.worst) {
        c.worst = v;
        c.i = i;
        c.j = j;
    }
}

void energy_clauses(const Trajectory& traj, const CertifyOptions& opts, CertificateReport& rep) {
    const std::size_t n = traj.grid.n;
    const double tol = opts.tol_energy < 0.0 ? energy_tolerance(traj.E0) : opts.tol_energy;
    const double dt = traj.grid.dt;

    // (i)
    double sup = 0.0, h1 = 0.0, div = 0.0;
    bool finite = true;
    std::vector<double> n1(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        finite = finite && traj.u[i].is_finite();
        sup = std::max(sup, sobolev_norm(traj.u[i], 0.0));
        n1[i] = sobolev_norm(traj.u[i], 1.0);
        const double d = divergence_residual(traj.u[i]);
        if (d > div) {
            div = d;
            rep.regularity.i = rep.regularity.j = i;
        }
    }
    for (std::size_t l = 0; l < n; ++l) h1 += 0.5 * dt * (n1[l] * n1[l] + n1[l + 1] * n1[l + 1]);
    rep.sup_l2 = sup;
    rep.int_h1 = h1;
    rep.regularity.worst = div;
    rep.regularity.pass = finite && std::isfinite(sup) && std::isfinite(h1) && div <= 1e-12 * (1.0 + sup);

    // (ii)
    ClauseResult& id = rep.energy_identity;
    for (std::size_t i = 0; i <= n; ++i) {
        if (i > 0) note(id, std::abs(traj.E[i] - traj.energy[i]) - tol, i, i);
        note(id, traj.energy[i] - traj.E[i] - opts.tol_cone, i, i);
    }
    id.pass = id.worst <= 0.0;

    // (iii)
    ClauseResult& ineq = rep.energy_inequality;
    std::vector<double> cum(n + 1, 0.0);
    for (std::size_t l = 0; l < n; ++l) cum[l + 1] = cum[l] + traj.dissipation[l];
    for (std::size_t i = 0; i < n; ++i)
        if (traj.E[i + 1] - traj.E[i] > opts.tol_monotone) {
            if (rep.monotone_violations == 0 || traj.E[i + 1] - traj.E[i] > ineq.worst) {
                ineq.worst = std::max(ineq.worst, traj.E[i + 1] - traj.E[i]);
                ineq.i = i;
                ineq.j = i + 1;
            }
            ++rep.monotone_violations;
        }
    // Indicator test functions on [t_i, t_j] and hat functions centred at t_i.
    double worst_window = -std::numeric_limits<double>::infinity();
    std::size_t wi = 0, wj = 0;
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j) {
            const double v = traj.E[j] - traj.E[i] + cum[j] - cum[i];
            if (v > worst_window) {
                worst_window = v;
                wi = i;
                wj = j;
            }
        }
    for (std::size_t i = 1; i < n; ++i) {
        const double v = 0.5 * (traj.E[i + 1] - traj.E[i - 1]) + 0.5 * (traj.dissipation[i - 1] + traj.dissipation[i]);
        if (v > worst_window) {
            worst_window = v;
            wi = i - 1;
            wj = i + 1;
        }
    }
    rep.min_energy_slack = std::numeric_limits<double>::infinity();
    std::size_t slack_at = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = traj.E0 + tol - traj.energy[i] - cum[i];
        if (s < rep.min_energy_slack) {
            rep.min_energy_slack = s;
            slack_at = i;
        }
    }
    if (rep.monotone_violations == 0) {
        if (worst_window - tol > 0.0) {
            ineq.worst = worst_window - tol;
            ineq.i = wi;
            ineq.j = wj;
        } else if (rep.min_energy_slack < 0.0) {
            ineq.worst = -rep.min_energy_slack;
            ineq.i = 0;
            ineq.j = slack_at;
        }
    }
    ineq.pass = rep.monotone_violations == 0 && worst_window <= tol && rep.min_energy_slack >= 0.0;
}

}  // namespace

CertificateReport certify_energy(const Trajectory& traj, const CertifyOptions& opts) {
    CertificateReport rep;
    energy_clauses(traj, opts, rep);
    return rep;
}

CertificateReport certify(const Trajectory& traj, const RemainderLedger& ledger, const RoughPath& rp,
                          const DriverSet& ds, const CertifyOptions& opts) {
    check_compat(traj, rp, ds);
    if (!(ledger.grid == traj.grid)) throw Error(ErrorKind::incompatible, "ledger and trajectory grids differ");
    CertificateReport rep;
    energy_clauses(traj, opts, rep);

    const Lattice& L = traj.u[0].lattice();
    const std::size_t K = ds.dim();
    for (int b = 0; b < 3; ++b)
        for (std::size_t k = 0; k < K; ++k) {
            std::vector<double> z(K, 0.0), zz(K * K, 0.0);
            z[k] = 1.0;
            rep.m_hat = std::max(rep.m_hat, driver_norms(RoughDriverEval(ds, z, zz, 1), L, b).a1);
        }
    const HolderNorms hn = holder_norms(rp);
    rep.R = std::max(hn.z, std::sqrt(hn.zz));
    rep.p = ledger.p;
    const double p = ledger.p, alpha = rp.alpha();
    const double u_sup = rep.sup_l2;
    const TimeGrid& g = traj.grid;

    ClauseResult& rb = rep.remainder_bound;
    const ControlCheck cc = is_control(ledger.omega, 1e-12 * (1.0 + ledger.omega(0, g.n)));
    bool dominated = true;
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = i + 1; j <= g.n; ++j) {
            if (!ledger.computed(i, j)) break;
            const double span = g.time(j) - g.time(i);
            const double vp = varpi(rep.m_hat, rep.R, alpha, span);
            if (vp > opts.L) continue;
            ++rep.certified_windows;
            const double r = ledger.natural(i, j);
            const double w = ledger.omega(i, j);
            if (r > std::pow(w, 3.0 / p) * (1.0 + 1e-9) + 1e-300) {
                dominated = false;
                note(rb, r - std::pow(w, 3.0 / p), i, j);
            }
            rep.fitted_c = std::max(rep.fitted_c, r / std::pow(vp, 3.0 / p));
            const double wa = span * std::pow(rep.m_hat * rep.R, p);
            if (wa <= opts.L_tilde) {
                const double shape = std::pow(u_sup, p / 3.0) * wa +
                                     std::pow(1.0 + u_sup, 2.0 * p / 3.0) * std::pow(span, p / 3.0) * std::pow(wa, 1.0 / 12.0);
                if (shape > 0.0) {
                    ++rep.shape_windows;
                    rep.shape_ratio = std::max(rep.shape_ratio, w / shape);
                }
            }
        }
    if (!cc.ok) note(rb, cc.worst, cc.i, cc.k);
    rb.pass = cc.ok && dominated && std::isfinite(rep.fitted_c);
    return rep;
}

void CertificateReport::write(std::ostream& os) const {
    auto clause = [&](const char* name, const ClauseResult& c) {
        os << name << ".pass=" << (c.pass ? "true" : "false") << '\n'
           << name << ".worst=" << format_double(c.worst) << '\n'
           << name << ".witness_i=" << c.i << '\n'
           << name << ".witness_j=" << c.j << '\n';
    };
    clause("clause_1_regularity", regularity);
    clause("clause_2_energy_identity", energy_identity);
    clause("clause_3_energy_inequality", energy_inequality);
    clause("clause_4_remainder", remainder_bound);
    os << "sup_l2=" << format_double(sup_l2) << '\n'
       << "int_h1_squared=" << format_double(int_h1) << '\n'
       << "min_energy_slack=" << format_double(min_energy_slack) << '\n'
       << "monotone_violations=" << monotone_violations << '\n'
       << "m_hat=" << format_double(m_hat) << '\n'
       << "R=" << format_double(R) << '\n'
       << "p=" << format_double(p) << '\n'
       << "fitted_c=" << format_double(fitted_c) << '\n'
       << "shape_ratio=" << format_double(shape_ratio) << '\n'
       << "certified_windows=" << certified_windows << '\n'
       << "shape_windows=" << shape_windows << '\n'
       << "all_pass=" << (all_pass() ? "true" : "false") << '\n';
}

// ---------------------------------------------------------------------------

double sup_distance_hm1(const Trajectory& a, const Trajectory& b) {
    if (!(a.grid == b.grid)) throw Error(ErrorKind::incompatible, "trajectories live on different grids");
    double m = 0.0;
    for (std::size_t i = 0; i <= a.grid.n; ++i) m = std::max(m, sobolev_norm(a.u[i] - b.u[i], -1.0));
    return m;
}

double energy_l1_distance(const Trajectory& a, const Trajectory& b) {
    if (!(a.grid == b.grid)) throw Error(ErrorKind::incompatible, "trajectories live on different grids");
    double s = 0.0;
    for (std::size_t l = 0; l < a.grid.n; ++l)
        s += 0.5 * a.grid.dt * (std::abs(a.E[l] - b.E[l]) + std::abs(a.E[l + 1] - b.E[l + 1]));
    return s;
}

std::vector<WzRow> wz_convergence(const SpectralField& u0, double E0, const PathSamples& z, const DriverSet& ds,
                                  const std::vector<std::size_t>& levels, double alpha, const SolveConfig& cfg) {
    std::vector<std::size_t> all = levels;
    if (std::find(all.begin(), all.end(), std::size_t{1}) == all.end()) all.push_back(1);
    const std::vector<RoughPath> lifts = wong_zakai_sequence(z, all, alpha);
    const std::size_t finest = static_cast<std::size_t>(std::find(all.begin(), all.end(), std::size_t{1}) - all.begin());
    SolveConfig c = cfg;
    c.keep_pressure = false;
    const Trajectory ref = solve(u0, E0, lifts[finest], ds, c);
    std::vector<WzRow> rows;
    for (std::size_t q = 0; q < levels.size(); ++q) {
        WzRow r;
        r.factor = levels[q];
        if (levels[q] != 1) {
            const Trajectory t = solve(u0, E0, lifts[q], ds, c);
            r.sup_hm1 = sup_distance_hm1(t, ref);
            r.energy_l1 = energy_l1_distance(t, ref);
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace roughns
