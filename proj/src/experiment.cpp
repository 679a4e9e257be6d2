#include "roughns/experiment.hpp"

#include "roughns/errors.hpp"
#include "roughns/io.hpp"

#include <Eigen/Core>
#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#ifndef ROUGHNS_VERSION
#define ROUGHNS_VERSION "0.0.0"
#endif

namespace roughns {

const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> kinds{"chen-check",      "wz-convergence",  "energy-certificate",
                                                "selection-demo",  "semigroup-check", "rds-check",
                                                "exact-mode"};
    return kinds;
}

const std::vector<SchemaKey>& config_schema() {
    static const std::vector<SchemaKey> schema{
        {"kind", "", "experiment kind; must match the subcommand when given"},
        {"lattice.N", "4", "Fourier cutoff |k|_inf <= N"},
        {"grid.T", "1", "time horizon"},
        {"grid.n", "256", "number of uniform time steps"},
        {"noise.generator", "fbm", "fbm, brownian or zero"},
        {"noise.H", "", "Hurst index in (0, 1); required for fbm"},
        {"noise.K", "2", "number of noise components"},
        {"noise.seeds", "1", "comma-separated seeds"},
        {"rough.alpha", "auto", "Hoelder exponent in (1/3, 1/2] below H; auto picks a default from H"},
        {"sigma.kind", "shear", "shear or constant"},
        {"sigma.amplitude", "0.2", "shear amplitude"},
        {"sigma.constant", "0.7,0,0", "3 K numbers: one constant vector per component"},
        {"init.kind", "random", "random or mode"},
        {"init.seed", "7", "seed of the random initial field"},
        {"init.max_mode", "2", "random field modes |k|_inf <= max_mode"},
        {"init.norm", "0.5", "L2 norm of the random initial field"},
        {"init.k", "1,1,0", "wave vector of the single-mode initial field"},
        {"init.amplitude", "0,0,1", "cosine amplitude vector of the single mode, orthogonal to init.k"},
        {"solver.scheme", "exponential", "exponential or davie"},
        {"solver.convection", "explicit", "explicit or midpoint"},
        {"solver.substeps", "1", "substeps per grid step"},
        {"solver.order", "2", "1 drops the second level of the driver"},
        {"solver.extra_dissipation", "0", "viscosity multiplier 1 + eps on the whole horizon"},
        {"solver.blowup_factor", "1000", "growth of |u|_0 over |u0|_0 that counts as blow-up"},
        {"certify.remainder", "true", "check the remainder clause as well"},
        {"certify.window", "32", "longest remainder window in grid steps (0: all pairs)"},
        {"certify.L", "1", "windows with varpi <= L are certified"},
        {"certify.L_tilde", "1", "smallness threshold for the shape ratio"},
        {"certify.tol_monotone", "1e-9", "tolerance of the monotone energy check"},
        {"selection.variants", "0", "extra dissipation of each base member"},
        {"selection.closure", "", "closure times of the ensemble (grid points in (0, T))"},
        {"selection.functionals", "3", "number of Krylov functionals"},
        {"selection.tol_sel", "1e-9", "selection tie tolerance"},
        {"selection.tol_cmp", "1e-9", "energy order tolerance"},
        {"selection.max_members", "64", "member cap of an ensemble"},
        {"wz.levels", "8,4,2,1", "coarsening factors; must contain 1 and divide grid.n"},
        {"wz.min_fraction", "0.8", "fraction of seeds with monotone distances needed to pass"},
        {"semigroup.t1", "0.25,0.25,0.5", "first times of the semigroup pairs"},
        {"semigroup.t2", "0.25,0.5,0.5", "second times of the semigroup pairs"},
        {"rds.s", "0.125,0.25,0.25,0.5,0.0625", "shift times of the cocycle pairs"},
        {"rds.t", "0.25,0.25,0.5,0.25,0.125", "evaluation times of the cocycle pairs"},
        {"rds.phi", "true", "also check the cocycle of the selected solution map"},
        {"tol.chen", "1e-12", "Chen residual bound"},
        {"tol.exact", "1e-3", "H0 error bound of the exact-mode check"},
        {"tol.rds", "1e-12", "rough path cocycle bound"},
        {"tol.factor", "10", "semigroup and cocycle residuals must stay below tol.factor * tol_sel"},
        {"run.workers", "1", "worker threads over seeds"},
    };
    return schema;
}

namespace {

template <class F>
auto as_config_error(const Config& c, const std::string& field, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        const Config::Entry* en = c.find(field);
        throw ConfigError(field, en ? en->line : 0, e.what());
    }
}

[[noreturn]] void fail(const Config& c, const std::string& field, const std::string& what) {
    const Config::Entry* e = c.find(field);
    throw ConfigError(field, e ? e->line : 0, what);
}

bool on_grid(double t, double dt, std::size_t& idx) {
    const double r = t / dt;
    const double k = std::round(r);
    if (k < 0.0 || std::abs(r - k) > 1e-9 * std::max(1.0, r)) return false;
    idx = static_cast<std::size_t>(k);
    return true;
}

std::string join(const std::vector<std::uint64_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

double half_norm2(const SpectralField& u) {
    const double n = sobolev_norm(u, 0.0);
    return 0.5 * n * n;
}

/// f(seed) for every seed on cfg.workers threads, collected in seed order.
template <class R>
std::vector<R> per_seed(const ExperimentConfig& cfg, const std::function<R(std::uint64_t)>& f) {
    const std::size_t count = cfg.seeds.size();
    std::vector<R> out(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next++) < count;) {
            try {
                out[i] = f(cfg.seeds[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < std::min(cfg.workers, count); ++w) pool.emplace_back(work);
    work();
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

EnsembleConfig ensemble_config(const ExperimentConfig& cfg, const std::vector<std::size_t>& closure) {
    EnsembleConfig e;
    e.solve = cfg.solve;
    for (double eps : cfg.variants) {
        Variant v;
        v.substeps = cfg.solve.substeps;
        v.order = cfg.solve.order;
        v.extra = cfg.solve.extra;
        v.extra.eps = eps;
        e.variants.push_back(v);
    }
    e.closure_steps = closure;
    e.max_members = cfg.max_members;
    e.certify = cfg.certify;
    e.tol_cmp = cfg.tol_cmp;
    return e;
}

std::vector<std::size_t> closure_steps(const ExperimentConfig& cfg) {
    std::vector<std::size_t> out;
    for (double t : cfg.closure) out.push_back(cfg.step_of(t, "selection.closure"));
    return out;
}

std::string prefix_lines(const std::string& text, const std::string& prefix, bool skip_header) {
    std::istringstream is(text);
    std::string line, out;
    bool first = true;
    while (std::getline(is, line)) {
        if (first && skip_header) {
            first = false;
            continue;
        }
        first = false;
        out += prefix + line + '\n';
    }
    return out;
}

std::string header_of(const std::string& text) { return text.substr(0, text.find('\n')); }

ExperimentResult run_chen(const ExperimentConfig& cfg) {
    struct Row {
        ChenReport chen;
        double additivity = 0.0;
    };
    const auto rows = per_seed<Row>(cfg, [&](std::uint64_t seed) {
        const RoughPath rp = lift_piecewise_linear(cfg.noise(seed), cfg.alpha);
        return Row{check_chen(rp), additivity_residual(rp)};
    });
    ExperimentResult res;
    std::ostringstream os;
    os << "seed,n,K,H,chen_residual,additivity_residual,i,j,k\n";
    double worst = 0.0;
    for (std::size_t q = 0; q < rows.size(); ++q) {
        const Row& r = rows[q];
        os << cfg.seeds[q] << ',' << cfg.n << ',' << cfg.K << ',' << format_double(cfg.H) << ','
           << format_double(r.chen.residual) << ',' << format_double(r.additivity) << ',' << r.chen.i << ','
           << r.chen.j << ',' << r.chen.k << '\n';
        worst = std::max({worst, r.chen.residual, r.additivity});
    }
    res.pass = worst <= cfg.tol_chen;
    res.artifacts.push_back({"chen-check_residuals.csv", os.str()});
    res.summary.push_back("max Chen residual " + format_double(worst) + " (bound " + format_double(cfg.tol_chen) + ")");
    return res;
}

bool non_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1]) return false;
    return true;
}

ExperimentResult run_wz(const ExperimentConfig& cfg) {
    const SpectralField u0 = cfg.initial();
    const double E0 = half_norm2(u0);
    const DriverSet ds = cfg.drivers();
    const auto rows = per_seed<std::vector<WzRow>>(cfg, [&](std::uint64_t seed) {
        return wz_convergence(u0, E0, cfg.noise(seed), ds, cfg.wz_levels, cfg.alpha, cfg.solve);
    });
    ExperimentResult res;
    std::ostringstream dist, summ;
    dist << "seed,factor,sup_hm1,energy_l1\n";
    summ << "seed,monotone_hm1,monotone_energy\n";
    std::size_t good_hm1 = 0, good_energy = 0;
    for (std::size_t q = 0; q < rows.size(); ++q) {
        std::vector<WzRow> sorted = rows[q];
        std::stable_sort(sorted.begin(), sorted.end(), [](const WzRow& a, const WzRow& b) { return a.factor > b.factor; });
        std::vector<double> h, e;
        for (const WzRow& r : sorted) {
            dist << cfg.seeds[q] << ',' << r.factor << ',' << format_double(r.sup_hm1) << ','
                 << format_double(r.energy_l1) << '\n';
            h.push_back(r.sup_hm1);
            e.push_back(r.energy_l1);
        }
        const bool mh = non_increasing(h), me = non_increasing(e);
        good_hm1 += mh;
        good_energy += me;
        summ << cfg.seeds[q] << ',' << (mh ? 1 : 0) << ',' << (me ? 1 : 0) << '\n';
    }
    const double need = cfg.wz_min_fraction * static_cast<double>(rows.size());
    res.pass = static_cast<double>(good_hm1) >= need - 1e-12 && static_cast<double>(good_energy) >= need - 1e-12;
    res.artifacts.push_back({"wz-convergence_distances.csv", dist.str()});
    res.artifacts.push_back({"wz-convergence_summary.csv", summ.str()});
    res.summary.push_back("monotone H^-1 distances for " + std::to_string(good_hm1) + " of " +
                          std::to_string(rows.size()) + " seeds, energy distances for " +
                          std::to_string(good_energy));
    return res;
}

ExperimentResult run_energy(const ExperimentConfig& cfg) {
    const SpectralField u0 = cfg.initial();
    const double E0 = half_norm2(u0);
    const DriverSet ds = cfg.drivers();
    struct Out {
        std::string traj;
        CertificateReport rep;
    };
    const auto outs = per_seed<Out>(cfg, [&](std::uint64_t seed) {
        const RoughPath rp = lift_piecewise_linear(cfg.noise(seed), cfg.alpha);
        SolveConfig sc = cfg.solve;
        sc.keep_pressure = false;
        const Trajectory tr = solve(u0, E0, rp, ds, sc);
        std::ostringstream os;
        write_csv(os, tr);
        Out o;
        o.traj = os.str();
        if (cfg.certify_remainder) {
            const RemainderLedger led = remainder(tr, rp, ds, {}, cfg.solve.remainder_window);
            o.rep = certify(tr, led, rp, ds, cfg.certify);
        } else {
            o.rep = certify_energy(tr, cfg.certify);
        }
        return o;
    });
    ExperimentResult res;
    std::ostringstream traj, cl;
    traj << "seed," << header_of(outs.front().traj) << '\n';
    cl << "seed,regularity,energy_identity,energy_inequality,remainder_bound,monotone_violations,min_energy_slack,"
          "fitted_c,shape_ratio\n";
    std::size_t violations = 0;
    double min_slack = INFINITY;
    for (std::size_t q = 0; q < outs.size(); ++q) {
        const std::string seed = std::to_string(cfg.seeds[q]);
        traj << prefix_lines(outs[q].traj, seed + ",", true);
        const CertificateReport& r = outs[q].rep;
        cl << seed << ',' << r.regularity.pass << ',' << r.energy_identity.pass << ',' << r.energy_inequality.pass
           << ',' << r.remainder_bound.pass << ',' << r.monotone_violations << ','
           << format_double(r.min_energy_slack) << ',' << format_double(r.fitted_c) << ','
           << format_double(r.shape_ratio) << '\n';
        violations += r.monotone_violations;
        min_slack = std::min(min_slack, r.min_energy_slack);
        res.pass = res.pass && r.all_pass() && r.monotone_violations == 0 && r.min_energy_slack >= 0.0;
    }
    res.artifacts.push_back({"energy-certificate_trajectory.csv", traj.str()});
    res.artifacts.push_back({"energy-certificate_clauses.csv", cl.str()});
    res.summary.push_back("monotone violations " + std::to_string(violations) + ", min energy slack " +
                          format_double(min_slack));
    return res;
}

ExperimentResult run_selection(const ExperimentConfig& cfg) {
    const SpectralField u0 = cfg.initial();
    const double E0 = half_norm2(u0);
    const DriverSet ds = cfg.drivers();
    const std::vector<FunctionalSpec> specs = default_specs(cfg.functionals);
    const EnsembleConfig ec = ensemble_config(cfg, closure_steps(cfg));
    struct Out {
        std::string members, trace;
        SelectionResult sel;
        bool admissible = false;
        std::size_t size = 0, certified = 0;
    };
    const auto outs = per_seed<Out>(cfg, [&](std::uint64_t seed) {
        const RoughPath rp = lift_piecewise_linear(cfg.noise(seed), cfg.alpha);
        const Ensemble ens = build_ensemble(u0, E0, rp, ds, ec);
        Out o;
        o.sel = select(ens, specs, 0, cfg.tol_sel);
        o.admissible = is_admissible(ens, o.sel.id);
        o.size = ens.members.size();
        o.certified = ens.members_at(0).size();
        std::ostringstream m, t;
        write_manifest(m, ens);
        write_trace(t, ens, o.sel, specs);
        o.members = m.str();
        o.trace = t.str();
        return o;
    });
    ExperimentResult res;
    std::ostringstream mem, sel, trace;
    mem << "seed," << header_of(outs.front().members) << '\n';
    sel << "seed,selected,flag,admissible,members,certified_at_0\n";
    std::size_t ok = 0;
    for (std::size_t q = 0; q < outs.size(); ++q) {
        const std::string seed = std::to_string(cfg.seeds[q]);
        const Out& o = outs[q];
        mem << prefix_lines(o.members, seed + ",", true);
        sel << seed << ',' << o.sel.id << ',' << to_string(o.sel.flag) << ',' << o.admissible << ',' << o.size << ','
            << o.certified << '\n';
        trace << "seed=" << seed << '\n' << o.trace << '\n';
        ok += o.admissible;
    }
    res.pass = ok == outs.size();
    res.artifacts.push_back({"selection-demo_members.csv", mem.str()});
    res.artifacts.push_back({"selection-demo_selection.csv", sel.str()});
    res.artifacts.push_back({"selection-demo_trace.txt", trace.str()});
    res.summary.push_back("admissible selection for " + std::to_string(ok) + " of " + std::to_string(outs.size()) +
                          " seeds");
    return res;
}

ExperimentResult run_semigroup(const ExperimentConfig& cfg) {
    const SpectralField u0 = cfg.initial();
    const double E0 = half_norm2(u0);
    const DriverSet ds = cfg.drivers();
    const std::vector<FunctionalSpec> specs = default_specs(cfg.functionals);
    std::vector<std::size_t> closure = closure_steps(cfg);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t q = 0; q < cfg.semigroup_t1.size(); ++q) {
        pairs.emplace_back(cfg.step_of(cfg.semigroup_t1[q], "semigroup.t1"), cfg.step_of(cfg.semigroup_t2[q], "semigroup.t2"));
        if (pairs.back().first > 0) closure.push_back(pairs.back().first);
    }
    std::sort(closure.begin(), closure.end());
    closure.erase(std::unique(closure.begin(), closure.end()), closure.end());
    const EnsembleConfig ec = ensemble_config(cfg, closure);
    const auto outs = per_seed<std::vector<double>>(cfg, [&](std::uint64_t seed) {
        const RoughPath rp = lift_piecewise_linear(cfg.noise(seed), cfg.alpha);
        const Ensemble ens = build_ensemble(u0, E0, rp, ds, ec);
        std::vector<double> r;
        for (const auto& [a, b] : pairs) r.push_back(semigroup_residual(ens, specs, a, b, cfg.tol_sel));
        return r;
    });
    ExperimentResult res;
    const double bound = cfg.tol_factor * cfg.tol_sel;
    std::ostringstream os;
    os << "seed,t1,t2,residual,pass\n";
    double worst = 0.0;
    for (std::size_t q = 0; q < outs.size(); ++q)
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const double r = outs[q][p];
            os << cfg.seeds[q] << ',' << format_double(cfg.semigroup_t1[p]) << ',' << format_double(cfg.semigroup_t2[p])
               << ',' << format_double(r) << ',' << (r <= bound) << '\n';
            worst = std::max(worst, r);
            res.pass = res.pass && r <= bound;
        }
    res.artifacts.push_back({"semigroup-check_residuals.csv", os.str()});
    res.summary.push_back("max semigroup residual " + format_double(worst) + " (bound " + format_double(bound) + ")");
    return res;
}

ExperimentResult run_rds(const ExperimentConfig& cfg) {
    const SpectralField u0 = cfg.initial();
    const double E0 = half_norm2(u0);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::size_t horizon = 1;
    for (std::size_t q = 0; q < cfg.rds_s.size(); ++q) {
        pairs.emplace_back(cfg.step_of(cfg.rds_s[q], "rds.s"), cfg.step_of(cfg.rds_t[q], "rds.t"));
        horizon = std::max(horizon, pairs.back().first + pairs.back().second);
    }
    PhiConfig pc;
    pc.ensemble = ensemble_config(cfg, {});
    pc.specs = default_specs(cfg.functionals);
    pc.drivers = cfg.drivers();
    pc.steps = horizon;
    pc.alpha = cfg.alpha;
    pc.tol_sel = cfg.tol_sel;
    const auto outs = per_seed<std::vector<CocycleRow>>(cfg, [&](std::uint64_t seed) {
        const PathSamples two_sided = [&] {
            // Sampled on [-2T, 2T] so that Phi on the shifted noise stays inside the horizon.
            ExperimentConfig wide = cfg;
            wide.n = 4 * cfg.n;
            wide.T = 4 * cfg.T;
            PathSamples z = wide.noise(seed);
            z.grid.t0 = -2 * cfg.T;
            return z;
        }();
        const NoisePoint w(two_sided, 2 * cfg.n, seed);
        std::vector<CocycleRow> rows;
        for (const auto& [s, t] : pairs) {
            CocycleRow r;
            r.seed = seed;
            r.s = static_cast<double>(s) * w.dt();
            r.t = static_cast<double>(t) * w.dt();
            const RpCocycleResidual rr = cocycle_check_rp(w, s, t, cfg.alpha);
            r.residual_z = rr.z;
            r.residual_zz = rr.zz;
            if (cfg.rds_phi) r.residual_phi = cocycle_residual_phi(s, t, w, u0, E0, pc);
            rows.push_back(r);
        }
        return rows;
    });
    ExperimentResult res;
    std::vector<CocycleRow> all;
    double wz = 0.0, wphi = 0.0;
    for (const auto& rows : outs)
        for (const CocycleRow& r : rows) {
            all.push_back(r);
            wz = std::max({wz, r.residual_z, r.residual_zz});
            wphi = std::max(wphi, r.residual_phi);
        }
    const double bound = cfg.tol_factor * cfg.tol_sel;
    res.pass = wz <= cfg.tol_rds && wphi <= bound;
    std::ostringstream os;
    write_csv(os, all);
    res.artifacts.push_back({"rds-check_residuals.csv", os.str()});
    res.summary.push_back("max rough path cocycle residual " + format_double(wz) + " (bound " +
                          format_double(cfg.tol_rds) + ")");
    if (cfg.rds_phi)
        res.summary.push_back("max solution cocycle residual " + format_double(wphi) + " (bound " + format_double(bound) +
                              ")");
    return res;
}

ExperimentResult run_exact(const ExperimentConfig& cfg) {
    const SpectralField u0 = cfg.initial();
    const double E0 = half_norm2(u0);
    const DriverSet ds = cfg.drivers();
    const double nu = 1.0 + cfg.solve.extra.eps;
    struct Out {
        std::vector<double> err, rel;
    };
    const auto outs = per_seed<Out>(cfg, [&](std::uint64_t seed) {
        const PathSamples z = cfg.noise(seed);
        SolveConfig sc = cfg.solve;
        sc.keep_pressure = false;
        const Trajectory tr = solve(u0, E0, lift_piecewise_linear(z, cfg.alpha), ds, sc);
        const Lattice& L = u0.lattice();
        Out o;
        for (std::size_t i = 0; i <= cfg.n; ++i) {
            const double t = tr.grid.time(i);
            // u(t, x) = e^{t nu Delta} u0(x + sum_k c_k (z_k(t) - z_k(0))).
            std::array<double, 3> a{};
            for (std::size_t k = 0; k < cfg.K; ++k)
                for (std::size_t c = 0; c < 3; ++c) a[c] += cfg.sigma_constant[3 * k + c] * (z.value(i, k) - z.value(0, k));
            SpectralField exact = heat_propagate(u0, t, nu);
            for (std::size_t m = 0; m < L.size(); ++m) {
                const Mode& kk = L.mode(m);
                const cplx phase = std::polar(1.0, kk[0] * a[0] + kk[1] * a[1] + kk[2] * a[2]);
                for (cplx& v : exact[m]) v *= phase;
            }
            const double e = sobolev_norm(tr.u[i] - exact, 0.0);
            const double ref = sobolev_norm(exact, 0.0);
            o.err.push_back(e);
            o.rel.push_back(ref > 0.0 ? e / ref : e);
        }
        return o;
    });
    ExperimentResult res;
    std::ostringstream os;
    os << "seed,t,h0_error,relative_error\n";
    double worst = 0.0, worst_rel = 0.0;
    for (std::size_t q = 0; q < outs.size(); ++q)
        for (std::size_t i = 0; i <= cfg.n; ++i) {
            os << cfg.seeds[q] << ',' << format_double(static_cast<double>(i) * cfg.T / static_cast<double>(cfg.n))
               << ',' << format_double(outs[q].err[i]) << ',' << format_double(outs[q].rel[i]) << '\n';
            worst = std::max(worst, outs[q].err[i]);
            worst_rel = std::max(worst_rel, outs[q].rel[i]);
        }
    res.pass = worst <= cfg.tol_exact;
    res.artifacts.push_back({"exact-mode_errors.csv", os.str()});
    res.summary.push_back("max H0 error " + format_double(worst) + " (bound " + format_double(cfg.tol_exact) +
                          "), max relative error " + format_double(worst_rel));
    return res;
}

}  // namespace

DriverSet ExperimentConfig::drivers() const {
    std::vector<TransportField> s;
    for (std::size_t k = 0; k < K; ++k)
        s.push_back(sigma_kind == "constant"
                        ? constant_transport({sigma_constant[3 * k], sigma_constant[3 * k + 1], sigma_constant[3 * k + 2]})
                        : shear_transport(k, sigma_amplitude));
    return DriverSet(std::move(s));
}

SpectralField ExperimentConfig::initial() const {
    const Lattice L(N);
    if (init_kind == "mode") return trig_field(L, init_k, init_amplitude, {0.0, 0.0, 0.0});
    return random_field(L, init_seed, init_max_mode, true, init_norm);
}

PathSamples ExperimentConfig::noise(std::uint64_t seed) const {
    const TimeGrid grid = uniform_grid(T, n);
    if (generator == "zero") return make_samples(grid, K, [](double, std::size_t) { return 0.0; });
    return sample_fbm(H, K, grid, seed);
}

std::size_t ExperimentConfig::step_of(double t, const std::string& field) const {
    std::size_t idx = 0;
    if (!on_grid(t, T / static_cast<double>(n), idx) || idx > n)
        fail(effective, field, "time " + format_double(t) + " is not a grid point of [0, T]");
    return idx;
}

ExperimentConfig parse_experiment(const Config& user, const std::string& kind) {
    const auto& kinds = experiment_kinds();
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) throw ConfigError("kind", 0, "unknown experiment " + kind);

    std::set<std::string> known;
    for (const SchemaKey& s : config_schema()) known.insert(s.key);
    for (const std::string& k : user.keys())
        if (!known.count(k)) throw ConfigError(k, user.find(k)->line, "unknown key");

    ExperimentConfig c;
    c.kind = kind;
    Config& eff = c.effective;
    for (const SchemaKey& s : config_schema()) {
        const Config::Entry* e = user.find(s.key);
        eff.set(s.key, e ? e->value : s.fallback, e ? e->line : 0);
    }
    if (eff.get_string("kind", "").empty()) eff.set("kind", kind);
    if (eff.get_string("kind", "") != kind) fail(eff, "kind", "config is for " + eff.get_string("kind", "") + ", not " + kind);

    auto positive_int = [&](const std::string& key, std::uint64_t lo, std::uint64_t hi) {
        const std::uint64_t v = eff.get_u64(key, 0);
        if (v < lo || v > hi) fail(eff, key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return v;
    };
    auto positive = [&](const std::string& key) {
        const double v = eff.get_double(key, 0.0);
        if (!(v > 0.0)) fail(eff, key, "must be positive");
        return v;
    };
    auto one_of = [&](const std::string& key, const std::vector<std::string>& allowed) {
        const std::string v = eff.get_string(key, "");
        if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
            std::string list;
            for (const std::string& a : allowed) list += (list.empty() ? "" : ", ") + a;
            fail(eff, key, "expected one of " + list + ", got '" + v + "'");
        }
        return v;
    };

    c.N = static_cast<int>(positive_int("lattice.N", 1, 16));
    c.T = positive("grid.T");
    c.n = positive_int("grid.n", 1, 1u << 16);
    c.generator = one_of("noise.generator", {"fbm", "brownian", "zero"});
    if (c.generator == "fbm") {
        if (eff.get_string("noise.H", "").empty()) fail(eff, "noise.H", "missing; required for the fbm generator");
        c.H = eff.get_double("noise.H", 0.5);
        if (!(c.H > 0.0 && c.H < 1.0)) fail(eff, "noise.H", "must lie in (0, 1)");
    } else if (!eff.get_string("noise.H", "").empty()) {
        c.H = eff.get_double("noise.H", 0.5);
        if (c.H != 0.5) fail(eff, "noise.H", "only the fbm generator takes a Hurst index other than 1/2");
    }
    c.K = positive_int("noise.K", 1, 8);
    c.seeds = eff.get_u64s("noise.seeds", {});
    if (c.seeds.empty()) fail(eff, "noise.seeds", "needs at least one seed");
    eff.set("noise.seeds", join(c.seeds), eff.find("noise.seeds")->line);

    const std::string alpha = eff.get_string("rough.alpha", "auto");
    c.alpha = alpha == "auto" ? default_alpha(c.H) : eff.get_double("rough.alpha", 0.0);
    as_config_error(eff, "rough.alpha", [&] {
        PathSamples probe;
        probe.generator = c.generator == "fbm" ? Generator::fbm : c.generator == "brownian" ? Generator::brownian
                                                                                            : Generator::smooth;
        probe.hurst = c.H;
        validate_alpha(c.alpha, probe);
        return 0;
    });

    c.sigma_kind = one_of("sigma.kind", {"shear", "constant"});
    c.sigma_amplitude = eff.get_double("sigma.amplitude", 0.2);
    c.sigma_constant = eff.get_doubles("sigma.constant", {});
    if (c.sigma_kind == "constant" && c.sigma_constant.size() != 3 * c.K)
        fail(eff, "sigma.constant", "needs 3 K = " + std::to_string(3 * c.K) + " numbers");

    c.init_kind = one_of("init.kind", {"random", "mode"});
    c.init_seed = eff.get_u64("init.seed", 7);
    c.init_max_mode = static_cast<int>(positive_int("init.max_mode", 1, static_cast<std::uint64_t>(c.N)));
    c.init_norm = positive("init.norm");
    {
        const std::vector<double> k = eff.get_doubles("init.k", {});
        const std::vector<double> a = eff.get_doubles("init.amplitude", {});
        if (k.size() != 3) fail(eff, "init.k", "needs 3 integers");
        if (a.size() != 3) fail(eff, "init.amplitude", "needs 3 numbers");
        for (std::size_t i = 0; i < 3; ++i) {
            if (k[i] != std::round(k[i]) || std::abs(k[i]) > c.N)
                fail(eff, "init.k", "entries must be integers with |k_i| <= lattice.N");
            c.init_k[i] = static_cast<int>(k[i]);
            c.init_amplitude[i] = a[i];
        }
        if (c.init_kind == "mode") {
            if (c.init_k == Mode{0, 0, 0}) fail(eff, "init.k", "must be nonzero");
            if (std::abs(k[0] * a[0] + k[1] * a[1] + k[2] * a[2]) > 1e-12)
                fail(eff, "init.amplitude", "must be orthogonal to init.k (divergence-free)");
        }
    }

    c.solve.cutoff = c.N;
    c.solve.scheme = as_config_error(eff, "solver.scheme", [&] { return parse_scheme(eff.get_string("solver.scheme", "")); });
    c.solve.convection =
        as_config_error(eff, "solver.convection", [&] { return parse_convection(eff.get_string("solver.convection", "")); });
    c.solve.substeps = positive_int("solver.substeps", 1, 1024);
    c.solve.order = static_cast<int>(positive_int("solver.order", 1, 2));
    c.solve.extra.eps = eff.get_double("solver.extra_dissipation", 0.0);
    if (c.solve.extra.eps < 0.0) fail(eff, "solver.extra_dissipation", "must be nonnegative");
    c.solve.blowup_factor = eff.get_double("solver.blowup_factor", 1e3);
    if (!(c.solve.blowup_factor > 1.0)) fail(eff, "solver.blowup_factor", "must exceed 1");

    c.certify_remainder = eff.get_bool("certify.remainder", true);
    c.solve.remainder_window = eff.get_u64("certify.window", 32);
    c.certify.L = positive("certify.L");
    c.certify.L_tilde = positive("certify.L_tilde");
    c.certify.tol_monotone = positive("certify.tol_monotone");

    c.variants = eff.get_doubles("selection.variants", {});
    if (c.variants.empty()) fail(eff, "selection.variants", "needs at least one base member");
    for (double e : c.variants)
        if (e < 0.0) fail(eff, "selection.variants", "dissipation must be nonnegative");
    c.closure = eff.get_doubles("selection.closure", {});
    for (double t : c.closure) {
        const std::size_t i = c.step_of(t, "selection.closure");
        if (i == 0 || i >= c.n) fail(eff, "selection.closure", "closure times lie strictly inside (0, T)");
    }
    c.functionals = positive_int("selection.functionals", 1, 64);
    c.tol_sel = positive("selection.tol_sel");
    c.tol_cmp = positive("selection.tol_cmp");
    c.max_members = positive_int("selection.max_members", 1, 4096);

    c.wz_levels.clear();
    for (double f : eff.get_doubles("wz.levels", {})) {
        if (f < 1.0 || f != std::round(f) || c.n % static_cast<std::size_t>(f) != 0)
            fail(eff, "wz.levels", "factors must be positive integers dividing grid.n");
        c.wz_levels.push_back(static_cast<std::size_t>(f));
    }
    if (std::find(c.wz_levels.begin(), c.wz_levels.end(), std::size_t{1}) == c.wz_levels.end())
        fail(eff, "wz.levels", "must contain 1 (the reference level)");
    c.wz_min_fraction = eff.get_double("wz.min_fraction", 0.8);
    if (c.wz_min_fraction < 0.0 || c.wz_min_fraction > 1.0) fail(eff, "wz.min_fraction", "must lie in [0, 1]");

    c.semigroup_t1 = eff.get_doubles("semigroup.t1", {});
    c.semigroup_t2 = eff.get_doubles("semigroup.t2", {});
    if (c.semigroup_t1.size() != c.semigroup_t2.size()) fail(eff, "semigroup.t2", "needs as many entries as semigroup.t1");
    c.rds_s = eff.get_doubles("rds.s", {});
    c.rds_t = eff.get_doubles("rds.t", {});
    if (c.rds_s.size() != c.rds_t.size()) fail(eff, "rds.t", "needs as many entries as rds.s");
    c.rds_phi = eff.get_bool("rds.phi", true);
    if (kind == "semigroup-check") {
        if (c.semigroup_t1.empty()) fail(eff, "semigroup.t1", "needs at least one pair");
        for (std::size_t q = 0; q < c.semigroup_t1.size(); ++q) {
            const std::size_t a = c.step_of(c.semigroup_t1[q], "semigroup.t1");
            const std::size_t b = c.step_of(c.semigroup_t2[q], "semigroup.t2");
            if (a >= c.n || a + b > c.n) fail(eff, "semigroup.t2", "t1 < T and t1 + t2 <= T are required");
        }
    }
    if (kind == "rds-check") {
        if (c.rds_s.empty()) fail(eff, "rds.s", "needs at least one pair");
        for (std::size_t q = 0; q < c.rds_s.size(); ++q) {
            const std::size_t s = c.step_of(c.rds_s[q], "rds.s");
            const std::size_t t = c.step_of(c.rds_t[q], "rds.t");
            if (t == 0 || s + t > c.n) fail(eff, "rds.t", "0 < t and s + t <= T are required");
        }
    }

    c.tol_chen = positive("tol.chen");
    c.tol_exact = positive("tol.exact");
    c.tol_rds = positive("tol.rds");
    c.tol_factor = positive("tol.factor");
    c.workers = positive_int("run.workers", 1, 256);

    if (kind == "exact-mode") {
        if (c.sigma_kind != "constant") fail(eff, "sigma.kind", "exact-mode needs constant transport");
        if (c.init_kind != "mode") fail(eff, "init.kind", "exact-mode needs a single-mode initial field");
    }
    return c;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.kind == "chen-check") return run_chen(cfg);
    if (cfg.kind == "wz-convergence") return run_wz(cfg);
    if (cfg.kind == "energy-certificate") return run_energy(cfg);
    if (cfg.kind == "selection-demo") return run_selection(cfg);
    if (cfg.kind == "semigroup-check") return run_semigroup(cfg);
    if (cfg.kind == "rds-check") return run_rds(cfg);
    if (cfg.kind == "exact-mode") return run_exact(cfg);
    throw ConfigError("kind", 0, "unknown experiment " + cfg.kind);
}

std::string version_string() {
    return std::string("roughns ") + ROUGHNS_VERSION + "; " + fftw_version + "; eigen " +
           std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
           std::to_string(EIGEN_MINOR_VERSION);
}

std::string manifest_text(const ExperimentConfig& cfg, const ExperimentResult& result) {
    std::ostringstream body;
    cfg.effective.write(body);
    char hash[19];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(body.str())));
    std::ostringstream os;
    os << "# manifest of a " << cfg.kind << " run; re-run with: roughns " << cfg.kind << " --config manifest.txt\n";
    os << "# config_hash = fnv1a:" << hash << '\n';
    os << "# versions = " << version_string() << '\n';
    os << "# seeds = " << join(cfg.seeds) << '\n';
    os << "# outcome = " << (result.pass ? "pass" : "fail") << '\n';
    for (const Artifact& a : result.artifacts) os << "# artifact = " << a.name << '\n';
    os << body.str();
    return os.str();
}

void write_artifacts(const std::string& dir, const ExperimentConfig& cfg, const ExperimentResult& result) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::invalid_input, "cannot create output directory " + dir + ": " + ec.message());
    auto put = [&](const std::string& name, const std::string& content) {
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        out << content;
        if (!out) throw Error(ErrorKind::invalid_input, "cannot write " + name);
    };
    for (const Artifact& a : result.artifacts) put(a.name, a.content);
    put("manifest.txt", manifest_text(cfg, result));
}

}  // namespace roughns
