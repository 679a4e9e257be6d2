#include "roughns/variation.hpp"

#include "roughns/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace roughns {

PairTable::PairTable(const TimeGrid& grid, double fill)
    : grid_(grid), v_((grid.n + 1) * (grid.n + 2) / 2, fill) {}

void PairTable::assign(const std::function<double(std::size_t, std::size_t)>& f) {
    for (std::size_t i = 0; i <= grid_.n; ++i) {
        auto r = row(i);
        for (std::size_t q = 0; q < r.size(); ++q) r[q] = f(i, i + q);
    }
}

TwoIndexMap TwoIndexMap::from_function(const TimeGrid& grid,
                                       const std::function<double(std::size_t, std::size_t)>& f) {
    TwoIndexMap g(grid);
    g.assign([&](std::size_t i, std::size_t j) { return i == j ? 0.0 : std::abs(f(i, j)); });
    return g;
}

TwoIndexMap TwoIndexMap::from_increments(const PathSamples& z) {
    return from_function(z.grid, [&](std::size_t i, std::size_t j) {
        double s = 0.0;
        for (std::size_t a = 0; a < z.dim; ++a) {
            const double d = z.value(j, a) - z.value(i, a);
            s += d * d;
        }
        return std::sqrt(s);
    });
}

TwoIndexMap TwoIndexMap::from_first_level(const RoughPath& rp) {
    TwoIndexMap g(rp.grid());
    std::vector<double> scratch;
    for (std::size_t i = 0; i <= rp.grid().n; ++i) {
        const RowView r = rp.row(i, scratch);
        auto out = g.row(i);
        for (std::size_t q = 0; q < r.len; ++q) {
            double m = 0.0;
            for (std::size_t a = 0; a < rp.dim(); ++a) m = std::max(m, std::abs(r.z(a)[q]));
            out[q] = m;
        }
    }
    return g;
}

Control Control::from_function(const TimeGrid& grid, const std::function<double(std::size_t, std::size_t)>& f) {
    Control w(grid);
    w.assign(f);
    return w;
}

Control Control::linear(const TimeGrid& grid, double rate) {
    return from_function(grid, [&](std::size_t i, std::size_t j) {
        return rate * static_cast<double>(j - i) * grid.dt;
    });
}

Control operator+(const Control& a, const Control& b) {
    if (!(a.grid() == b.grid())) throw Error(ErrorKind::incompatible, "controls live on different grids");
    return Control::from_function(a.grid(), [&](std::size_t i, std::size_t j) { return a(i, j) + b(i, j); });
}

Control product(const Control& a, double ea, const Control& b, double eb) {
    if (!(a.grid() == b.grid())) throw Error(ErrorKind::incompatible, "controls live on different grids");
    return Control::from_function(a.grid(), [&](std::size_t i, std::size_t j) {
        return std::pow(a(i, j), ea) * std::pow(b(i, j), eb);
    });
}

namespace {

// |g_kj|^p stored by column: entry (k, j) for k < j at j*(j-1)/2 + k.
class PoweredColumns {
public:
    PoweredColumns(const TwoIndexMap& g, double p, const std::function<bool(std::size_t, std::size_t)>* admissible)
        : n_(g.grid().n), v_(n_ * (n_ + 1) / 2, 0.0) {
        for (std::size_t k = 0; k < n_; ++k) {
            const auto r = g.row(k);
            for (std::size_t j = k + 1; j <= n_; ++j) {
                if (admissible && !(*admissible)(k, j)) continue;
                v_[j * (j - 1) / 2 + k] = std::pow(r[j - k], p);
            }
        }
    }
    const double* column(std::size_t j) const { return v_.data() + j * (j - 1) / 2; }

private:
    std::size_t n_;
    std::vector<double> v_;
};

// V[j] = sup over partitions of [t_i, t_j] of the sum of powered increments.
void variation_dp(const PoweredColumns& cols, std::size_t i, std::size_t last, std::vector<double>& V) {
    V.assign(last + 1, 0.0);
    for (std::size_t j = i + 1; j <= last; ++j) {
        const auto len = static_cast<Eigen::Index>(j - i);
        Eigen::Map<const Eigen::ArrayXd> prev(V.data() + i, len), col(cols.column(j) + i, len);
        V[j] = (prev + col).maxCoeff();
    }
}

void check_p(double p, double lower) {
    if (!(p >= lower) || !std::isfinite(p))
        throw Error(ErrorKind::invalid_parameter, "variation exponent out of range");
}

}  // namespace

double p_variation(const TwoIndexMap& g, double p, std::size_t i0, std::size_t i1) {
    check_p(p, 1.0);
    if (i0 >= i1 || i1 > g.grid().n) throw Error(ErrorKind::invalid_interval, "window needs i0 < i1 <= n");
    const PoweredColumns cols(g, p, nullptr);
    std::vector<double> V;
    variation_dp(cols, i0, i1, V);
    return std::pow(V[i1], 1.0 / p);
}

double p_variation(const TwoIndexMap& g, double p) { return p_variation(g, p, 0, g.grid().n); }

namespace {

Control canonical_control(const TwoIndexMap& g, double p,
                          const std::function<bool(std::size_t, std::size_t)>* admissible) {
    if (!(p > 0.0) || !std::isfinite(p)) throw Error(ErrorKind::invalid_parameter, "variation exponent must be positive");
    const std::size_t n = g.grid().n;
    const PoweredColumns cols(g, p, admissible);
    Control w(g.grid());
    std::vector<double> V;
    for (std::size_t i = 0; i <= n; ++i) {
        variation_dp(cols, i, n, V);
        auto r = w.row(i);
        for (std::size_t q = 0; q < r.size(); ++q) r[q] = V[i + q];
    }
    return w;
}

}  // namespace

Control control_from_variation(const TwoIndexMap& g, double p) { return canonical_control(g, p, nullptr); }

Control control_from_variation(const TwoIndexMap& g, double p,
                               const std::function<bool(std::size_t, std::size_t)>& admissible) {
    return canonical_control(g, p, &admissible);
}

ControlCheck is_control(const Control& w, double tol) {
    ControlCheck out;
    const std::size_t n = w.grid().n;
    auto note = [&](double v, std::size_t i, std::size_t j, std::size_t k) {
        if (!(v <= out.worst)) {
            out.worst = v;
            out.i = i;
            out.j = j;
            out.k = k;
        }
    };
    for (std::size_t i = 0; i <= n; ++i) {
        note(std::abs(w(i, i)), i, i, i);
        for (double v : w.row(i)) note(-v, i, i, i);
    }
    for (std::size_t i = 0; i <= n; ++i) {
        const auto ri = w.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto rj = w.row(j);
            const auto len = static_cast<Eigen::Index>(n - j);
            Eigen::Map<const Eigen::ArrayXd> left(rj.data() + 1, len), whole(ri.data() + (j - i) + 1, len);
            const auto defect = (left + ri[j - i]) - whole;
            const double m = defect.maxCoeff();
            if (!(m <= out.worst)) {
                Eigen::Index idx = 0;
                defect.maxCoeff(&idx);
                note(m, i, j, j + 1 + static_cast<std::size_t>(idx));
            }
        }
    }
    out.ok = out.worst <= tol;
    return out;
}

LocalSeminorm local_variation_seminorm(const TwoIndexMap& g, double p, const Control& varpi, double L,
                                       std::size_t i0, std::size_t i1) {
    if (!(L > 0.0)) throw Error(ErrorKind::invalid_parameter, "L must be positive");
    if (!(varpi.grid() == g.grid())) throw Error(ErrorKind::incompatible, "control and map live on different grids");
    if (i0 >= i1 || i1 > g.grid().n) throw Error(ErrorKind::invalid_interval, "window needs i0 < i1 <= n");
    auto admissible = [&](std::size_t i, std::size_t j) { return varpi(i, j) <= L; };
    LocalSeminorm out;
    bool any = false;
    for (std::size_t i = i0; i < i1 && !any; ++i)
        for (std::size_t j = i + 1; j <= i1; ++j)
            if (admissible(i, j)) {
                any = true;
                break;
            }
    if (!any) {
        out.empty_window = true;
        return out;
    }
    const Control w = control_from_variation(g, p, admissible);
    for (std::size_t i = i0; i < i1; ++i)
        for (std::size_t j = i + 1; j <= i1; ++j) {
            if (!admissible(i, j) || g(i, j) == 0.0) continue;
            out.c = std::max(out.c, g(i, j) / std::pow(w(i, j), 1.0 / p));
        }
    out.value = out.c * std::pow(w(i0, i1), 1.0 / p);
    return out;
}

LocalSeminorm local_variation_seminorm(const TwoIndexMap& g, double p, const Control& varpi, double L) {
    return local_variation_seminorm(g, p, varpi, L, 0, g.grid().n);
}

}  // namespace roughns
