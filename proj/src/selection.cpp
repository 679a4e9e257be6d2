#include "roughns/selection.hpp"

#include "roughns/errors.hpp"
#include "roughns/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace roughns {

namespace {

std::string ids_to_string(const std::vector<std::size_t>& ids) {
    std::ostringstream os;
    for (std::size_t q = 0; q < ids.size(); ++q) os << (q ? " " : "") << ids[q];
    return os.str();
}

std::string describe(const Variant& v) {
    std::ostringstream os;
    os << "base substeps=" << v.substeps << " order=" << v.order << " eps=" << format_double(v.extra.eps);
    if (v.extra.eps > 0.0)
        os << " window=[" << format_double(v.extra.t_begin) << ";" << format_double(v.extra.t_end) << ")";
    return os.str();
}

}  // namespace

std::vector<std::size_t> Ensemble::members_at(std::size_t offset) const {
    std::vector<std::size_t> out;
    for (const Member& m : members)
        if (m.offset == offset && m.certified) out.push_back(m.id);
    return out;
}

Trajectory shift_traj(const Trajectory& traj, std::size_t T) {
    const std::size_t n = traj.grid.n;
    if (T >= n) throw Error(ErrorKind::invalid_shift, "shift must be smaller than the number of steps");
    if (T == 0) return traj;
    Trajectory out;
    out.grid = traj.grid.tail(T);
    out.E0 = traj.E_left(T);
    out.u.assign(traj.u.begin() + static_cast<std::ptrdiff_t>(T), traj.u.end());
    out.E.assign(traj.E.begin() + static_cast<std::ptrdiff_t>(T), traj.E.end());
    out.energy.assign(traj.energy.begin() + static_cast<std::ptrdiff_t>(T), traj.energy.end());
    out.dissipation.assign(traj.dissipation.begin() + static_cast<std::ptrdiff_t>(T), traj.dissipation.end());
    if (!traj.pressure.empty())
        for (std::size_t i = T; i <= n; ++i) out.pressure.push_back(traj.pressure[i] - traj.pressure[T]);
    return out;
}

Trajectory concat(const Trajectory& traj1, std::size_t T, const Trajectory& traj2, double tol) {
    const std::size_t n = traj1.grid.n;
    if (T >= n) throw Error(ErrorKind::invalid_continuation, "concatenation time must lie before the grid end");
    if (!(traj2.grid == traj1.grid.tail(T)))
        throw Error(ErrorKind::invalid_continuation, "continuation does not live on the tail grid");
    const SpectralField& uT = traj1.u[T];
    const double scale = 1.0 + sobolev_norm(uT, 0.0);
    if (sobolev_norm(traj2.u[0] - uT, 0.0) > tol * scale)
        throw Error(ErrorKind::invalid_continuation, "continuation does not start from u(T)");
    const double e_left = traj1.E_left(T);
    const double etol = tol * (1.0 + e_left);
    if (traj2.energy[0] > e_left + etol)
        throw Error(ErrorKind::invalid_continuation, "continuation starts with more energy than E(T-)");
    if (traj2.E0 > e_left + etol)
        throw Error(ErrorKind::invalid_continuation, "continuation energy datum exceeds E(T-)");

    Trajectory out;
    out.grid = traj1.grid;
    out.E0 = traj1.E0;
    const auto cut = static_cast<std::ptrdiff_t>(T + 1);
    out.u.assign(traj1.u.begin(), traj1.u.begin() + cut);
    out.u.insert(out.u.end(), traj2.u.begin() + 1, traj2.u.end());
    out.E.assign(traj1.E.begin(), traj1.E.begin() + cut);
    out.E.insert(out.E.end(), traj2.E.begin() + 1, traj2.E.end());
    out.energy.assign(traj1.energy.begin(), traj1.energy.begin() + cut);
    out.energy.insert(out.energy.end(), traj2.energy.begin() + 1, traj2.energy.end());
    out.dissipation.assign(traj1.dissipation.begin(), traj1.dissipation.begin() + static_cast<std::ptrdiff_t>(T));
    out.dissipation.insert(out.dissipation.end(), traj2.dissipation.begin(), traj2.dissipation.end());
    if (!traj1.pressure.empty() && !traj2.pressure.empty()) {
        out.pressure.assign(traj1.pressure.begin(), traj1.pressure.begin() + cut);
        for (std::size_t i = 1; i < traj2.pressure.size(); ++i)
            out.pressure.push_back(traj1.pressure[T] + (traj2.pressure[i] - traj2.pressure[0]));
    }
    return out;
}

SpectralField straddle_remainder(const Trajectory& traj, const RoughPath& rp, const DriverSet& ds, std::size_t s,
                                 std::size_t T, std::size_t t) {
    if (!(s <= T && T <= t && t <= traj.grid.n))
        throw Error(ErrorKind::invalid_interval, "straddling window needs s <= T <= t <= n");
    SpectralField r = remainder_field(traj, rp, ds, s, T) + remainder_field(traj, rp, ds, T, t);
    const RoughDriverEval first = build_driver(ds, rp, s, T);
    const RoughDriverEval second = build_driver(ds, rp, T, t);
    const SpectralField du = traj.u[T] - traj.u[s];
    r += second.a2(du);
    r += second.a1(du - first.a1(traj.u[s]));
    return r;
}

Ensemble build_ensemble(const SpectralField& u0, double E0, const RoughPath& rp, const DriverSet& ds,
                        const EnsembleConfig& cfg) {
    if (cfg.max_members < 1) throw Error(ErrorKind::invalid_parameter, "max_members must be at least 1");
    const std::size_t n = rp.grid().n;
    std::vector<std::size_t> times = cfg.closure_steps;
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    for (std::size_t T : times)
        if (T == 0 || T >= n) throw Error(ErrorKind::invalid_parameter, "closure steps must satisfy 0 < T < n");

    Ensemble ens;
    ens.E0 = E0;
    ens.rp = rp;
    ens.ds = ds;
    ens.tol_cmp = cfg.tol_cmp;
    auto add = [&](std::string prov, std::size_t offset, Trajectory traj, const RoughPath& path) {
        if (ens.members.size() >= cfg.max_members) {
            ++ens.dropped;
            ens.log.push_back("dropped (max_members): " + prov);
            return false;
        }
        Member m;
        m.id = ens.members.size();
        m.provenance = std::move(prov);
        m.offset = offset;
        m.traj = std::move(traj);
        m.rp = path;
        ens.members.push_back(std::move(m));
        return true;
    };

    std::vector<Variant> variants = cfg.variants;
    if (variants.empty()) variants.push_back({cfg.solve.substeps, cfg.solve.order, cfg.solve.extra});
    std::vector<std::size_t> base;
    for (const Variant& v : variants) {
        SolveConfig c = cfg.solve;
        c.substeps = v.substeps;
        c.order = v.order;
        c.extra = v.extra;
        Trajectory tr = solve(u0, E0, rp, ds, c);
        if (ens.members.empty()) ens.u0 = tr.u[0];
        if (add(describe(v), 0, std::move(tr), rp)) base.push_back(ens.members.back().id);
    }

    for (std::size_t T : times) {
        const RoughPath shifted = shift(rp, T);
        std::vector<Trajectory> tails;
        for (std::size_t b : base) {
            tails.push_back(shift_traj(ens.members[b].traj, T));
            add("shift T=" + std::to_string(T) + " of " + std::to_string(b), T, tails.back(), shifted);
        }
        for (std::size_t b1 : base)
            for (std::size_t q = 0; q < base.size(); ++q) {
                const std::string prov = "concat T=" + std::to_string(T) + " of " + std::to_string(b1) + " with shift of " +
                                         std::to_string(base[q]);
                try {
                    add(prov, 0, concat(ens.members[b1].traj, T, tails[q], cfg.tol_cmp), rp);
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::invalid_continuation) throw;
                    ens.log.push_back("skipped " + prov + ": " + e.what());
                }
            }
    }

    for (Member& m : ens.members) {
        if (!cfg.certify_members) {
            m.certified = true;
            continue;
        }
        const RemainderLedger led = remainder(m.traj, m.rp, ds, {}, cfg.solve.remainder_window);
        const CertificateReport rep = certify(m.traj, led, m.rp, ds, cfg.certify);
        m.certified = rep.all_pass();
        if (!m.certified) {
            std::ostringstream os;
            os << "member " << m.id << " failed certification:";
            if (!rep.regularity.pass) os << " regularity";
            if (!rep.energy_identity.pass) os << " energy-identity";
            if (!rep.energy_inequality.pass) os << " energy-inequality";
            if (!rep.remainder_bound.pass) os << " remainder";
            ens.log.push_back(os.str());
        }
    }
    return ens;
}

// ---------------------------------------------------------------------------

std::string to_string(Order o) {
    switch (o) {
        case Order::equal: return "equal";
        case Order::dominated_1: return "dominated-1";
        case Order::dominated_2: return "dominated-2";
        default: return "incomparable";
    }
}

Order compare(const Trajectory& a, const Trajectory& b, double tol_cmp) {
    if (!(a.grid == b.grid) || a.E.size() != b.E.size())
        throw Error(ErrorKind::incompatible, "trajectories live on different grids");
    bool a_le = a.E0 <= b.E0 + tol_cmp, b_le = b.E0 <= a.E0 + tol_cmp;
    for (std::size_t i = 0; i < a.E.size(); ++i) {
        a_le = a_le && a.E[i] <= b.E[i] + tol_cmp;
        b_le = b_le && b.E[i] <= a.E[i] + tol_cmp;
    }
    if (a_le && b_le) return Order::equal;
    if (a_le) return Order::dominated_1;
    if (b_le) return Order::dominated_2;
    return Order::incomparable;
}

double FunctionalSpec::apply_beta(double x) const {
    return beta_scale * (beta == BetaKind::tanh ? std::tanh(x) : std::atan(x));
}

double FunctionalSpec::beta_sup() const {
    return std::abs(beta_scale) * (beta == BetaKind::tanh ? 1.0 : 0.5 * std::numbers::pi);
}

SpectralField mode_basis(const Lattice& lattice, std::size_t n) {
    if (n == 0) throw Error(ErrorKind::invalid_parameter, "mode basis index starts at 1");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < lattice.size(); ++i)
        if (lattice.canonical(i)) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (lattice.k2(a) != lattice.k2(b)) return lattice.k2(a) < lattice.k2(b);
        return lattice.mode(a) < lattice.mode(b);
    });
    const std::size_t m = (n - 1) / 4;
    if (m >= idx.size()) throw Error(ErrorKind::invalid_parameter, "mode basis index exceeds the lattice");
    const Mode& k = lattice.mode(idx[m]);
    const std::array<double, 3> kd{double(k[0]), double(k[1]), double(k[2])};
    auto cross = [](const std::array<double, 3>& x, const std::array<double, 3>& y) {
        return std::array<double, 3>{x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]};
    };
    auto normalise = [](std::array<double, 3> x) {
        const double s = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        for (double& v : x) v /= s;
        return x;
    };
    const bool along_e3 = k[0] == 0 && k[1] == 0;
    const std::array<double, 3> a = normalise(cross(kd, along_e3 ? std::array<double, 3>{1, 0, 0}
                                                                  : std::array<double, 3>{0, 0, 1}));
    const std::array<double, 3> pol = ((n - 1) / 2) % 2 == 0 ? a : normalise(cross(kd, a));
    const bool sine = (n - 1) % 2 == 1;
    const std::array<double, 3> zero{0.0, 0.0, 0.0};
    SpectralField f = trig_field(lattice, k, sine ? zero : pol, sine ? pol : zero);
    f *= 1.0 / sobolev_norm(f, 0.0);
    return f;
}

double lambda_sequence(std::size_t k) {
    if (k == 0) throw Error(ErrorKind::invalid_parameter, "lambda sequence starts at k = 1");
    if (k == 1) return 1.0;
    const double m = static_cast<double>(k / 2 + 1);
    return k % 2 == 0 ? 1.0 / m : m;
}

std::vector<FunctionalSpec> default_specs(std::size_t count) {
    std::vector<FunctionalSpec> out;
    for (std::size_t d = 1; out.size() < count; ++d)
        for (std::size_t mode = 0; mode < d && out.size() < count; ++mode) {
            FunctionalSpec s;
            s.lambda = lambda_sequence(d - mode);
            s.mode = mode;
            out.push_back(s);
        }
    return out;
}

KrylovValue krylov_functional(const Trajectory& traj, const FunctionalSpec& spec) {
    if (!(spec.lambda > 0.0) || !std::isfinite(spec.lambda))
        throw Error(ErrorKind::invalid_parameter, "functional decay rate must be positive");
    if (!(spec.beta_scale > 0.0)) throw Error(ErrorKind::invalid_parameter, "beta scale must be positive");
    const std::size_t n = traj.grid.n;
    const double dt = traj.grid.dt;
    SpectralField e;
    if (spec.mode > 0) e = mode_basis(traj.u[0].lattice(), spec.mode);
    auto F = [&](std::size_t i) {
        const double x = spec.mode == 0 ? traj.E[i] : inner(traj.u[i], e);
        return std::exp(-spec.lambda * static_cast<double>(i) * dt) * spec.apply_beta(x);
    };
    KrylovValue out;
    double prev = F(0);
    for (std::size_t i = 1; i <= n; ++i) {
        const double cur = F(i);
        out.value += 0.5 * dt * (prev + cur);
        prev = cur;
    }
    out.tail = spec.beta_sup() * std::exp(-spec.lambda * static_cast<double>(n) * dt) / spec.lambda;
    return out;
}

std::string to_string(SelectionFlag f) {
    switch (f) {
        case SelectionFlag::unique: return "unique";
        case SelectionFlag::unique_up_to_tolerance: return "unique_up_to_tolerance";
        default: return "non_unique";
    }
}

SelectionResult select_among(const Ensemble& ens, const std::vector<std::size_t>& ids,
                             const std::vector<FunctionalSpec>& specs, double tol_sel) {
    if (ids.empty()) throw Error(ErrorKind::invalid_input, "cannot select from an empty ensemble");
    if (specs.empty() || specs[0].lambda != 1.0 || specs[0].mode != 0)
        throw Error(ErrorKind::invalid_parameter, "the functional list must begin with lambda = 1 on the total energy");
    SelectionResult res;
    std::vector<std::size_t> alive = ids;
    std::sort(alive.begin(), alive.end());
    for (std::size_t q = 0; q < specs.size() && alive.size() > 1; ++q) {
        SelectionStage st;
        st.spec_index = q;
        st.candidates = alive;
        for (std::size_t id : alive) st.values.push_back(krylov_functional(ens.member(id).traj, specs[q]).value);
        const double best = *std::min_element(st.values.begin(), st.values.end());
        const double tol = tol_sel * (1.0 + std::abs(best));
        for (std::size_t c = 0; c < alive.size(); ++c)
            if (st.values[c] <= best + tol) st.survivors.push_back(alive[c]);
        alive = st.survivors;
        res.trace.push_back(std::move(st));
    }
    res.id = alive.front();
    if (alive.size() == 1) {
        res.flag = SelectionFlag::unique;
    } else {
        const Trajectory& chosen = ens.member(res.id).traj;
        const bool same = std::all_of(alive.begin(), alive.end(), [&](std::size_t id) {
            return compare(chosen, ens.member(id).traj, ens.tol_cmp) == Order::equal;
        });
        res.flag = same ? SelectionFlag::unique_up_to_tolerance : SelectionFlag::non_unique;
    }
    return res;
}

SelectionResult select(const Ensemble& ens, const std::vector<FunctionalSpec>& specs, std::size_t offset,
                       double tol_sel) {
    return select_among(ens, ens.members_at(offset), specs, tol_sel);
}

bool is_admissible(const Ensemble& ens, std::size_t id) {
    const Member& m = ens.member(id);
    for (std::size_t other : ens.members_at(m.offset))
        if (other != id && compare(ens.member(other).traj, m.traj, ens.tol_cmp) == Order::dominated_1) return false;
    return true;
}

double semigroup_residual(const Ensemble& ens, const std::vector<FunctionalSpec>& specs, std::size_t t1,
                          std::size_t t2, double tol_sel) {
    const SelectionResult first = select(ens, specs, 0, tol_sel);
    const Trajectory& A = ens.member(first.id).traj;
    if (t1 + t2 > A.grid.n) throw Error(ErrorKind::invalid_interval, "t1 + t2 exceeds the grid");
    std::size_t b = first.id;
    if (t1 > 0) {
        const std::vector<std::size_t> shifted = ens.members_at(t1);
        if (shifted.empty())
            throw Error(ErrorKind::invalid_parameter, "t1 is not a closure step of the ensemble");
        const SpectralField& u = A.u[t1];
        const double e = A.E_left(t1);
        std::vector<std::size_t> matching;
        for (std::size_t id : shifted) {
            const Trajectory& t = ens.member(id).traj;
            if (sobolev_norm(t.u[0] - u, 0.0) <= ens.tol_cmp * (1.0 + sobolev_norm(u, 0.0)) &&
                std::abs(t.E0 - e) <= ens.tol_cmp * (1.0 + e))
                matching.push_back(id);
        }
        if (matching.empty())
            throw Error(ErrorKind::incompatible, "no shifted member starts from the selected state at t1");
        b = select_among(ens, matching, specs, tol_sel).id;
    }
    const Trajectory& B = ens.member(b).traj;
    return sobolev_norm(A.u[t1 + t2] - B.u[t2], -1.0) + std::abs(A.E_left(t1 + t2) - B.E_left(t2));
}

void write_trace(std::ostream& os, const Ensemble& ens, const SelectionResult& r,
                 const std::vector<FunctionalSpec>& specs) {
    os << "selected=" << r.id << '\n'
       << "provenance=" << ens.member(r.id).provenance << '\n'
       << "flag=" << to_string(r.flag) << '\n';
    for (const SelectionStage& st : r.trace) {
        const FunctionalSpec& s = specs[st.spec_index];
        os << "stage=" << st.spec_index << " lambda=" << format_double(s.lambda) << " mode=" << s.mode
           << " beta=" << (s.beta == BetaKind::tanh ? "tanh" : "atan") << " scale=" << format_double(s.beta_scale)
           << '\n';
        for (std::size_t c = 0; c < st.candidates.size(); ++c)
            os << "  candidate=" << st.candidates[c] << " value=" << format_double(st.values[c]) << '\n';
        os << "  survivors=" << ids_to_string(st.survivors) << '\n';
    }
}

void write_manifest(std::ostream& os, const Ensemble& ens) {
    os << "id,provenance,offset,certified,E0,final_energy\n";
    for (const Member& m : ens.members)
        os << m.id << ',' << m.provenance << ',' << m.offset << ',' << (m.certified ? 1 : 0) << ','
           << format_double(m.traj.E0) << ',' << format_double(m.traj.energy.back()) << '\n';
}

}  // namespace roughns
