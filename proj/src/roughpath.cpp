#include "roughns/roughpath.hpp"

#include "roughns/errors.hpp"
#include "roughns/io.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>

namespace roughns {

void TimeGrid::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt) || !std::isfinite(t0))
        throw Error(ErrorKind::invalid_input, "time grid needs finite dt > 0");
    if (n < 1) throw Error(ErrorKind::invalid_input, "time grid needs at least one step");
}

std::size_t TimeGrid::index_of(double t) const {
    const double x = (t - t0) / dt;
    const double r = std::round(x);
    if (r < 0.0 || r > static_cast<double>(n) || std::abs(x - r) > 1e-9 * std::max(1.0, std::abs(x)))
        throw Error(ErrorKind::invalid_parameter, "time " + format_double(t) + " is not a grid time");
    return static_cast<std::size_t>(r);
}

TimeGrid TimeGrid::tail(std::size_t m) const {
    if (m >= n) throw Error(ErrorKind::invalid_shift, "shift must be smaller than the number of steps");
    return TimeGrid{t0, dt, n - m};
}

TimeGrid uniform_grid(double horizon, std::size_t n) {
    if (n < 1 || !(horizon > 0.0)) throw Error(ErrorKind::invalid_input, "grid needs horizon > 0 and n >= 1");
    return TimeGrid{0.0, horizon / static_cast<double>(n), n};
}

std::string PathSamples::tag() const {
    switch (generator) {
        case Generator::fbm: return "fbm-" + format_double(hurst);
        case Generator::brownian: return "brownian";
        case Generator::smooth: return "smooth";
        case Generator::user: return "user";
    }
    return "user";
}

void PathSamples::validate() const {
    grid.validate();
    if (dim < 1) throw Error(ErrorKind::invalid_input, "path dimension must be at least 1");
    if (values.size() != grid.points() * dim)
        throw Error(ErrorKind::invalid_input, "path values do not match grid size");
    for (double v : values)
        if (!std::isfinite(v)) throw Error(ErrorKind::invalid_input, "path has non-finite values");
}

PathSamples make_samples(const TimeGrid& grid, std::size_t dim,
                         const std::function<double(double, std::size_t)>& f, Generator generator) {
    grid.validate();
    PathSamples z{grid, dim, std::vector<double>(grid.points() * dim), generator, 0.5};
    for (std::size_t i = 0; i <= grid.n; ++i)
        for (std::size_t a = 0; a < dim; ++a) z.values[i * dim + a] = f(grid.time(i), a);
    return z;
}

PathSamples tail(const PathSamples& z, std::size_t m) {
    PathSamples out = z;
    out.grid = z.grid.tail(m);
    out.values.assign(z.values.begin() + static_cast<std::ptrdiff_t>(m * z.dim), z.values.end());
    return out;
}

void write_csv(std::ostream& os, const PathSamples& z) {
    os << "t";
    for (std::size_t a = 0; a < z.dim; ++a) os << ",z_" << (a + 1);
    os << '\n';
    for (std::size_t i = 0; i <= z.grid.n; ++i) {
        os << format_double(z.grid.time(i));
        for (std::size_t a = 0; a < z.dim; ++a) os << ',' << format_double(z.value(i, a));
        os << '\n';
    }
}

PathSamples read_path_csv(std::istream& is) {
    const CsvTable table = read_csv(is);
    if (table.header.size() < 2 || table.header[0] != "t")
        throw Error(ErrorKind::invalid_input, "path csv needs columns t,z_1..z_K");
    if (table.rows.size() < 2) throw Error(ErrorKind::invalid_input, "path csv needs at least two rows");
    const std::size_t dim = table.header.size() - 1;
    const std::size_t n = table.rows.size() - 1;
    const double t0 = table.rows.front()[0];
    const double dt = (table.rows.back()[0] - t0) / static_cast<double>(n);
    PathSamples z{TimeGrid{t0, dt, n}, dim, {}, Generator::user, 0.5};
    z.values.reserve((n + 1) * dim);
    for (std::size_t i = 0; i <= n; ++i) {
        const auto& row = table.rows[i];
        if (std::abs(row[0] - z.grid.time(i)) > 1e-9 * std::max(1.0, std::abs(dt) * static_cast<double>(n)))
            throw Error(ErrorKind::invalid_input, "path csv times are not uniform");
        for (std::size_t a = 0; a < dim; ++a) z.values.push_back(row[a + 1]);
    }
    z.validate();
    return z;
}

// ---------------------------------------------------------------------------
// RoughPath

RoughPath RoughPath::from_steps(const TimeGrid& grid, std::size_t dim, double alpha,
                                std::vector<double> step_z, std::vector<double> step_zz,
                                std::size_t max_pairs) {
    grid.validate();
    if (dim < 1) throw Error(ErrorKind::invalid_input, "rough path dimension must be at least 1");
    if (step_z.size() != grid.n * dim || step_zz.size() != grid.n * dim * dim)
        throw Error(ErrorKind::invalid_input, "step increments do not match grid size");
    RoughPath rp;
    rp.grid_ = grid;
    rp.dim_ = dim;
    rp.alpha_ = alpha;
    rp.max_pairs_ = max_pairs;
    rp.step_z_ = std::move(step_z);
    rp.step_zz_ = std::move(step_zz);
    const std::size_t pairs = grid.points() * (grid.points() + 1) / 2;
    if (pairs <= max_pairs) rp.build_table();
    return rp;
}

RoughPath RoughPath::from_table(const TimeGrid& grid, std::size_t dim, double alpha, std::vector<double> step_z,
                                std::vector<double> step_zz, std::vector<double> table, std::size_t max_pairs) {
    RoughPath rp;
    rp.grid_ = grid;
    rp.dim_ = dim;
    rp.alpha_ = alpha;
    rp.max_pairs_ = max_pairs;
    rp.step_z_ = std::move(step_z);
    rp.step_zz_ = std::move(step_zz);
    rp.table_ = std::move(table);
    return rp;
}

RoughPath RoughPath::from_pairs(const TimeGrid& grid, std::size_t dim, double alpha, const PairFiller& fill) {
    grid.validate();
    RoughPath rp;
    rp.grid_ = grid;
    rp.dim_ = dim;
    rp.alpha_ = alpha;
    const std::size_t n = grid.n;
    const std::size_t comps = rp.components();
    rp.table_.assign(comps * (n + 1) * (n + 2) / 2, 0.0);
    std::vector<double> z(dim), zz(dim * dim);
    for (std::size_t i = 0; i <= n; ++i) {
        const std::size_t len = n - i + 1;
        double* row = rp.table_.data() + rp.row_offset(i);
        for (std::size_t j = i; j <= n; ++j) {
            std::fill(z.begin(), z.end(), 0.0);
            std::fill(zz.begin(), zz.end(), 0.0);
            fill(i, j, z, zz);
            for (std::size_t a = 0; a < dim; ++a) row[a * len + (j - i)] = z[a];
            for (std::size_t c = 0; c < dim * dim; ++c) row[(dim + c) * len + (j - i)] = zz[c];
        }
    }
    rp.step_z_.resize(n * dim);
    rp.step_zz_.resize(n * dim * dim);
    for (std::size_t l = 0; l < n; ++l) {
        const std::size_t len = n - l + 1;
        const double* row = rp.table_.data() + rp.row_offset(l);
        for (std::size_t a = 0; a < dim; ++a) rp.step_z_[l * dim + a] = row[a * len + 1];
        for (std::size_t c = 0; c < dim * dim; ++c) rp.step_zz_[l * dim * dim + c] = row[(dim + c) * len + 1];
    }
    rp.max_pairs_ = std::max(default_max_pairs, (n + 1) * (n + 2) / 2);
    return rp;
}

std::size_t RoughPath::row_offset(std::size_t i) const {
    return components() * (i * (grid_.n + 1) - i * (i - 1) / 2);
}

void RoughPath::fill_row(std::size_t i, double* out) const {
    const std::size_t n = grid_.n;
    const std::size_t len = n - i + 1;
    const std::size_t K = dim_;
    for (std::size_t c = 0; c < components(); ++c) out[c * len] = 0.0;
    for (std::size_t j = i; j < n; ++j) {
        const std::size_t q = j - i;
        const double* dz = step_z_.data() + j * K;
        const double* dzz = step_zz_.data() + j * K * K;
        for (std::size_t a = 0; a < K; ++a) out[a * len + q + 1] = out[a * len + q] + dz[a];
        for (std::size_t a = 0; a < K; ++a) {
            const double za = out[a * len + q];
            for (std::size_t b = 0; b < K; ++b) {
                double* c = out + (K + a * K + b) * len;
                c[q + 1] = c[q] + dzz[a * K + b] + za * dz[b];
            }
        }
    }
}

void RoughPath::build_table() {
    const std::size_t n = grid_.n;
    table_.assign(components() * (n + 1) * (n + 2) / 2, 0.0);
    for (std::size_t i = 0; i <= n; ++i) fill_row(i, table_.data() + row_offset(i));
}

RowView RoughPath::row(std::size_t i, std::vector<double>& scratch) const {
    const std::size_t len = grid_.n - i + 1;
    if (dense()) return RowView{i, len, dim_, table_.data() + row_offset(i)};
    scratch.resize(components() * len);
    fill_row(i, scratch.data());
    return RowView{i, len, dim_, scratch.data()};
}

void RoughPath::pair(std::size_t i, std::size_t j, std::span<double> z, std::span<double> zz) const {
    if (i > j || j > grid_.n) throw Error(ErrorKind::invalid_interval, "pair indices out of order or range");
    const std::size_t K = dim_;
    if (dense()) {
        const std::size_t len = grid_.n - i + 1;
        const double* row = table_.data() + row_offset(i);
        for (std::size_t a = 0; a < K; ++a) z[a] = row[a * len + (j - i)];
        for (std::size_t c = 0; c < K * K; ++c) zz[c] = row[(K + c) * len + (j - i)];
        return;
    }
    std::fill(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(K), 0.0);
    std::fill(zz.begin(), zz.begin() + static_cast<std::ptrdiff_t>(K * K), 0.0);
    for (std::size_t l = i; l < j; ++l) {
        const double* dz = step_z_.data() + l * K;
        const double* dzz = step_zz_.data() + l * K * K;
        for (std::size_t a = 0; a < K; ++a)
            for (std::size_t b = 0; b < K; ++b) zz[a * K + b] += dzz[a * K + b] + z[a] * dz[b];
        for (std::size_t a = 0; a < K; ++a) z[a] += dz[a];
    }
}

double RoughPath::z(std::size_t i, std::size_t j, std::size_t a) const {
    std::vector<double> zv(dim_), zzv(dim_ * dim_);
    pair(i, j, zv, zzv);
    return zv[a];
}

double RoughPath::zz(std::size_t i, std::size_t j, std::size_t a, std::size_t b) const {
    std::vector<double> zv(dim_), zzv(dim_ * dim_);
    pair(i, j, zv, zzv);
    return zzv[a * dim_ + b];
}

RoughPath RoughPath::bumped(std::size_t i, std::size_t j, std::size_t a, std::size_t b, double delta) const {
    std::vector<double> scratch;
    return from_pairs(grid_, dim_, alpha_, [&](std::size_t p, std::size_t q, std::span<double> z, std::span<double> zz) {
        pair(p, q, z, zz);
        if (p == i && q == j) zz[a * dim_ + b] += delta;
    });
}

RoughPath RoughPath::scaled(double c) const {
    RoughPath out = *this;
    const std::size_t K = dim_;
    for (double& v : out.step_z_) v *= c;
    for (double& v : out.step_zz_) v *= c * c;
    if (dense()) {
        const std::size_t n = grid_.n;
        for (std::size_t i = 0; i <= n; ++i) {
            const std::size_t len = n - i + 1;
            double* row = out.table_.data() + row_offset(i);
            for (std::size_t q = 0; q < K * len; ++q) row[q] *= c;
            for (std::size_t q = K * len; q < components() * len; ++q) row[q] *= c * c;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

double default_alpha(double hurst) {
    const double h = std::min(hurst, 0.5);
    const double a = h - 0.05;
    if (a > 1.0 / 3.0 + 0.01) return a;
    return 0.5 * (1.0 / 3.0 + h);
}

void validate_alpha(double alpha, const PathSamples& z) {
    if (!(alpha > 1.0 / 3.0) || !(alpha <= 0.5))
        throw Error(ErrorKind::invalid_parameter, "alpha must lie in (1/3, 1/2]");
    if (z.generator == Generator::fbm || z.generator == Generator::brownian) {
        const double h = z.generator == Generator::brownian ? 0.5 : z.hurst;
        if (!(alpha < h - 1e-6))
            throw Error(ErrorKind::invalid_parameter, "alpha must be below the Hurst index of the sample");
    }
}

RoughPath lift_piecewise_linear(const PathSamples& z, double alpha, std::size_t max_pairs) {
    if (z.grid.n < 1 || z.values.empty()) throw Error(ErrorKind::invalid_input, "cannot lift an empty grid");
    z.validate();
    validate_alpha(alpha, z);
    const std::size_t n = z.grid.n;
    const std::size_t K = z.dim;
    std::vector<double> sz(n * K), szz(n * K * K);
    for (std::size_t l = 0; l < n; ++l) {
        for (std::size_t a = 0; a < K; ++a) sz[l * K + a] = z.value(l + 1, a) - z.value(l, a);
        for (std::size_t a = 0; a < K; ++a)
            for (std::size_t b = 0; b < K; ++b) szz[(l * K + a) * K + b] = 0.5 * sz[l * K + a] * sz[l * K + b];
    }
    return RoughPath::from_steps(z.grid, K, alpha, std::move(sz), std::move(szz), max_pairs);
}

ChenReport check_chen(const RoughPath& rp) {
    using Arr = Eigen::Map<const Eigen::ArrayXd>;
    ChenReport rep;
    const std::size_t n = rp.grid().n;
    const std::size_t K = rp.dim();
    // Rows i are processed in blocks so that each row j is streamed once per block.
    constexpr std::size_t block = 16;
    std::vector<std::vector<double>> si(block);
    std::vector<RowView> rows(block);
    std::vector<double> sj;
    for (std::size_t i0 = 0; i0 <= n; i0 += block) {
        const std::size_t i1 = std::min(n + 1, i0 + block);
        for (std::size_t i = i0; i < i1; ++i) rows[i - i0] = rp.row(i, si[i - i0]);
        for (std::size_t j = i0; j <= n; ++j) {
            const RowView rj = rp.row(j, sj);
            const auto len = static_cast<Eigen::Index>(n - j + 1);
            for (std::size_t i = i0; i < i1 && i <= j; ++i) {
                const RowView& ri = rows[i - i0];
                const std::size_t q = j - i;
                for (std::size_t a = 0; a < K; ++a) {
                    const double za = ri.z(a)[q];
                    for (std::size_t b = 0; b < K; ++b) {
                        const double* zzi = ri.zz(a, b).data();
                        const double c = zzi[q];
                        Arr lhs(zzi + q, len), rhs(rj.zz(a, b).data(), len), zb(rj.z(b).data(), len);
                        const auto res = ((lhs - rhs) - c - za * zb).abs();
                        const double m = res.maxCoeff();
                        if (!(m <= rep.residual)) {
                            Eigen::Index idx = 0;
                            const double mm = res.maxCoeff(&idx);
                            rep = ChenReport{std::isnan(m) ? m : mm, i, j, j + static_cast<std::size_t>(idx), a, b};
                            if (std::isnan(m)) return rep;
                        }
                    }
                }
            }
        }
    }
    return rep;
}

double additivity_residual(const RoughPath& rp) {
    using Arr = Eigen::Map<const Eigen::ArrayXd>;
    double worst = 0.0;
    const std::size_t n = rp.grid().n;
    std::vector<double> si, sj;
    for (std::size_t i = 0; i <= n; ++i) {
        const RowView ri = rp.row(i, si);
        for (std::size_t j = i; j <= n; ++j) {
            const RowView rj = rp.row(j, sj);
            const auto len = static_cast<Eigen::Index>(n - j + 1);
            for (std::size_t a = 0; a < rp.dim(); ++a) {
                Arr lhs(ri.z(a).data() + (j - i), len), rhs(rj.z(a).data(), len);
                worst = std::max(worst, ((lhs - rhs) - ri.z(a)[j - i]).abs().maxCoeff());
            }
        }
    }
    return worst;
}

double symmetry_residual(const RoughPath& rp) {
    double worst = 0.0;
    const std::size_t n = rp.grid().n;
    const std::size_t K = rp.dim();
    std::vector<double> s;
    for (std::size_t i = 0; i <= n; ++i) {
        const RowView r = rp.row(i, s);
        for (std::size_t a = 0; a < K; ++a)
            for (std::size_t b = a; b < K; ++b)
                for (std::size_t q = 0; q < r.len; ++q) {
                    const double sym = 0.5 * (r.zz(a, b)[q] + r.zz(b, a)[q]);
                    worst = std::max(worst, std::abs(sym - 0.5 * r.z(a)[q] * r.z(b)[q]));
                }
    }
    return worst;
}

namespace {

void check_window(const RoughPath& rp, std::size_t i0, std::size_t i1) {
    if (i0 >= i1) throw Error(ErrorKind::invalid_interval, "window needs i0 < i1");
    if (i1 > rp.grid().n) throw Error(ErrorKind::invalid_interval, "window exceeds the grid");
}

// Hoelder sup over pairs of the difference a - b (b may be null).
HolderNorms holder_difference(const RoughPath& a, const RoughPath* b, std::size_t i0, std::size_t i1) {
    const std::size_t K = a.dim();
    const double alpha = a.alpha();
    const double dt = a.grid().dt;
    std::vector<double> w1(i1 - i0 + 1), w2(i1 - i0 + 1);
    for (std::size_t q = 1; q <= i1 - i0; ++q) {
        const double h = static_cast<double>(q) * dt;
        w1[q] = std::pow(h, -alpha);
        w2[q] = std::pow(h, -2.0 * alpha);
    }
    HolderNorms out;
    std::vector<double> sa, sb;
    for (std::size_t i = i0; i < i1; ++i) {
        const RowView ra = a.row(i, sa);
        RowView rb;
        if (b) rb = b->row(i, sb);
        for (std::size_t q = 1; q <= i1 - i; ++q) {
            double mz = 0.0, mzz = 0.0;
            for (std::size_t c = 0; c < K; ++c) {
                const double d = ra.z(c)[q] - (b ? rb.z(c)[q] : 0.0);
                mz = std::max(mz, std::abs(d));
            }
            for (std::size_t c1 = 0; c1 < K; ++c1)
                for (std::size_t c2 = 0; c2 < K; ++c2) {
                    const double d = ra.zz(c1, c2)[q] - (b ? rb.zz(c1, c2)[q] : 0.0);
                    mzz = std::max(mzz, std::abs(d));
                }
            out.z = std::max(out.z, mz * w1[q]);
            out.zz = std::max(out.zz, mzz * w2[q]);
        }
    }
    out.triple = out.z + out.zz;
    return out;
}

}  // namespace

HolderNorms holder_norms(const RoughPath& rp, std::size_t i0, std::size_t i1) {
    check_window(rp, i0, i1);
    return holder_difference(rp, nullptr, i0, i1);
}

HolderNorms holder_norms(const RoughPath& rp) { return holder_norms(rp, 0, rp.grid().n); }

double rough_distance(const RoughPath& a, const RoughPath& b, std::size_t i0, std::size_t i1) {
    if (!(a.grid() == b.grid()) || a.dim() != b.dim() || a.alpha() != b.alpha())
        throw Error(ErrorKind::incompatible_paths, "rough paths differ in grid, dimension or alpha");
    check_window(a, i0, i1);
    return holder_difference(a, &b, i0, i1).triple;
}

double rough_distance(const RoughPath& a, const RoughPath& b) { return rough_distance(a, b, 0, a.grid().n); }

// ---------------------------------------------------------------------------
// fBm

namespace {

// Lower Cholesky factor of the unit-step fractional Gaussian noise covariance.
std::shared_ptr<const Eigen::MatrixXd> fgn_factor(double hurst, std::size_t n) {
    static std::mutex mu;
    static std::map<std::pair<double, std::size_t>, std::shared_ptr<const Eigen::MatrixXd>> cache;
    const std::lock_guard<std::mutex> lock(mu);
    const auto key = std::make_pair(hurst, n);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    const double h2 = 2.0 * hurst;
    auto gamma = [h2](double k) {
        return 0.5 * (std::pow(std::abs(k + 1.0), h2) - 2.0 * std::pow(std::abs(k), h2) +
                      std::pow(std::abs(k - 1.0), h2));
    };
    const auto m = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd cov(m, m);
    for (Eigen::Index r = 0; r < m; ++r)
        for (Eigen::Index c = 0; c < m; ++c) cov(r, c) = gamma(static_cast<double>(r - c));
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorKind::invalid_parameter, "fractional noise covariance is not positive definite");
    auto factor = std::make_shared<const Eigen::MatrixXd>(llt.matrixL());
    cache.emplace(key, factor);
    return factor;
}

}  // namespace

std::vector<double> sample_fbm_increments(double hurst, std::size_t dim, std::size_t n, double dt,
                                          std::uint64_t seed) {
    if (!(hurst > 1.0 / 3.0) || !(hurst <= 1.0))
        throw Error(ErrorKind::invalid_parameter, "Hurst index must lie in (1/3, 1]");
    if (n < 1 || dim < 1 || !(dt > 0.0)) throw Error(ErrorKind::invalid_input, "fbm needs n, K >= 1 and dt > 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = std::pow(dt, hurst);
    std::vector<double> out(n * dim);
    const auto m = static_cast<Eigen::Index>(n);
    Eigen::VectorXd xi(m);
    if (hurst == 1.0) {
        // Covariance is rank one: the path is a random straight line.
        for (std::size_t a = 0; a < dim; ++a) {
            const double g = normal(rng);
            for (std::size_t l = 0; l < n; ++l) out[l * dim + a] = scale * g;
        }
        return out;
    }
    if (hurst == 0.5) {
        // Independent increments: the covariance factor is the identity.
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t l = 0; l < n; ++l) out[l * dim + a] = scale * normal(rng);
        return out;
    }
    const auto factor = fgn_factor(hurst, n);
    for (std::size_t a = 0; a < dim; ++a) {
        for (Eigen::Index l = 0; l < m; ++l) xi(l) = normal(rng);
        const Eigen::VectorXd inc = factor->triangularView<Eigen::Lower>() * xi;
        for (std::size_t l = 0; l < n; ++l) out[l * dim + a] = scale * inc(static_cast<Eigen::Index>(l));
    }
    return out;
}

PathSamples sample_fbm(double hurst, std::size_t dim, const TimeGrid& grid, std::uint64_t seed) {
    grid.validate();
    const std::vector<double> inc = sample_fbm_increments(hurst, dim, grid.n, grid.dt, seed);
    PathSamples z{grid, dim, std::vector<double>(grid.points() * dim, 0.0),
                  hurst == 0.5 ? Generator::brownian : Generator::fbm, hurst};
    for (std::size_t l = 0; l < grid.n; ++l)
        for (std::size_t a = 0; a < dim; ++a) z.values[(l + 1) * dim + a] = z.values[l * dim + a] + inc[l * dim + a];
    return z;
}

RoughPath shift(const RoughPath& rp, std::size_t m) {
    if (m >= rp.grid().n) throw Error(ErrorKind::invalid_shift, "shift must be smaller than the number of steps");
    if (m == 0) return rp;
    const std::size_t K = rp.dim();
    const std::size_t n = rp.grid().n;
    const TimeGrid g = rp.grid().tail(m);
    std::vector<double> sz, szz;
    sz.reserve((n - m) * K);
    szz.reserve((n - m) * K * K);
    for (std::size_t l = m; l < n; ++l) {
        const auto a = rp.step_z(l);
        const auto b = rp.step_zz(l);
        sz.insert(sz.end(), a.begin(), a.end());
        szz.insert(szz.end(), b.begin(), b.end());
    }
    if (rp.dense()) {
        // Rows m..n of the table are exactly the rows of the shifted table.
        std::vector<double> scratch;
        const RowView first = rp.row(m, scratch);
        const std::size_t count = (K + K * K) * (n - m + 1) * (n - m + 2) / 2;
        return RoughPath::from_table(g, K, rp.alpha(), std::move(sz), std::move(szz),
                                     std::vector<double>(first.data, first.data + count), rp.max_pairs());
    }
    return RoughPath::from_steps(g, K, rp.alpha(), std::move(sz), std::move(szz), rp.max_pairs());
}

PathSamples coarsen(const PathSamples& z, std::size_t factor) {
    if (factor < 1 || z.grid.n % factor != 0)
        throw Error(ErrorKind::invalid_parameter, "coarsening factor must divide the number of steps");
    if (factor == 1) return z;
    PathSamples out = z;
    for (std::size_t i = 0; i <= z.grid.n; ++i) {
        const std::size_t c = i / factor;
        const std::size_t r = i % factor;
        if (r == 0) continue;
        const double w = static_cast<double>(r) / static_cast<double>(factor);
        for (std::size_t a = 0; a < z.dim; ++a) {
            const double lo = z.value(c * factor, a);
            const double hi = z.value((c + 1) * factor, a);
            out.values[i * z.dim + a] = lo + w * (hi - lo);
        }
    }
    return out;
}

PathSamples subsample(const PathSamples& z, std::size_t factor) {
    if (factor < 1 || z.grid.n % factor != 0)
        throw Error(ErrorKind::invalid_parameter, "subsampling factor must divide the number of steps");
    PathSamples out = z;
    out.grid = TimeGrid{z.grid.t0, z.grid.dt * static_cast<double>(factor), z.grid.n / factor};
    out.values.assign((out.grid.n + 1) * z.dim, 0.0);
    for (std::size_t i = 0; i <= out.grid.n; ++i)
        for (std::size_t a = 0; a < z.dim; ++a) out.values[i * z.dim + a] = z.value(i * factor, a);
    return out;
}

std::vector<RoughPath> wong_zakai_sequence(const PathSamples& z, const std::vector<std::size_t>& levels,
                                           double alpha, std::size_t max_pairs) {
    for (std::size_t f : levels)
        if (f < 1 || z.grid.n % f != 0)
            throw Error(ErrorKind::invalid_parameter, "coarsening factor " + std::to_string(f) + " does not divide n");
    std::vector<RoughPath> out;
    out.reserve(levels.size());
    for (std::size_t f : levels) out.push_back(lift_piecewise_linear(coarsen(z, f), alpha, max_pairs));
    return out;
}

}  // namespace roughns
