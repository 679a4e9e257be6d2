/// @file roughpath.hpp
/// @brief Uniform time grids, sampled paths and geometric rough paths (Z, ZZ).
///
/// Two-index quantities are stored as upper-triangular tables over grid pairs.
/// Row i holds, for each component c, the contiguous run (i,i), (i,i+1), ..., (i,n).
/// Components 0..K-1 are the first level Z^a, components K + a*K + b are ZZ^{ab}.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace roughns {

struct TimeGrid {
    double t0 = 0.0;
    double dt = 1.0;
    std::size_t n = 1;

    double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
    double end() const { return time(n); }
    std::size_t points() const { return n + 1; }

    /// Throws invalid-input unless dt > 0 and n >= 1.
    void validate() const;
    /// Grid index of a time that lies on the grid (1e-9 relative slack).
    std::size_t index_of(double t) const;
    /// Grid with the first m steps removed, keeping the same origin t0.
    TimeGrid tail(std::size_t m) const;

    bool operator==(const TimeGrid&) const = default;
};

/// Uniform grid of n steps covering [0, horizon].
TimeGrid uniform_grid(double horizon, std::size_t n);

enum class Generator { fbm, brownian, smooth, user };

struct PathSamples {
    TimeGrid grid;
    std::size_t dim = 1;
    std::vector<double> values;  ///< (n+1) x dim, row-major
    Generator generator = Generator::user;
    double hurst = 0.5;          ///< meaningful for fbm and brownian

    double value(std::size_t i, std::size_t a) const { return values[i * dim + a]; }
    std::string tag() const;
    /// Throws invalid-input on size mismatch or non-finite values.
    void validate() const;
};

PathSamples make_samples(const TimeGrid& grid, std::size_t dim,
                         const std::function<double(double, std::size_t)>& f,
                         Generator generator = Generator::smooth);

/// Values from grid index m on, re-indexed onto grid.tail(m).
PathSamples tail(const PathSamples& z, std::size_t m);

void write_csv(std::ostream& os, const PathSamples& z);
PathSamples read_path_csv(std::istream& is);

/// One row of a rough path table: pairs (start, start), ..., (start, start + len - 1).
struct RowView {
    std::size_t start = 0;
    std::size_t len = 0;
    std::size_t dim = 0;
    const double* data = nullptr;

    std::span<const double> z(std::size_t a) const { return {data + a * len, len}; }
    std::span<const double> zz(std::size_t a, std::size_t b) const {
        return {data + (dim + a * dim + b) * len, len};
    }
};

class RoughPath {
public:
    static constexpr std::size_t default_max_pairs = std::size_t{1} << 21;

    using PairFiller =
        std::function<void(std::size_t i, std::size_t j, std::span<double> z, std::span<double> zz)>;

    RoughPath() = default;

    /// Builds the path whose values on consecutive pairs are the given step
    /// increments and which satisfies Chen's relation on every triple.
    /// step_z has n*K entries, step_zz has n*K*K entries.
    static RoughPath from_steps(const TimeGrid& grid, std::size_t dim, double alpha,
                                std::vector<double> step_z, std::vector<double> step_zz,
                                std::size_t max_pairs = default_max_pairs);

    /// Dense table with arbitrary values on every pair (no relation imposed).
    static RoughPath from_pairs(const TimeGrid& grid, std::size_t dim, double alpha,
                                const PairFiller& fill);

    const TimeGrid& grid() const { return grid_; }
    std::size_t dim() const { return dim_; }
    double alpha() const { return alpha_; }
    bool dense() const { return !table_.empty(); }
    std::size_t max_pairs() const { return max_pairs_; }

    double z(std::size_t i, std::size_t j, std::size_t a) const;
    double zz(std::size_t i, std::size_t j, std::size_t a, std::size_t b) const;
    /// Writes Z_{ij} (K entries) and ZZ_{ij} (K*K entries, row-major).
    void pair(std::size_t i, std::size_t j, std::span<double> z, std::span<double> zz) const;

    /// Row i of the table; scratch is used when the path is stored lazily.
    RowView row(std::size_t i, std::vector<double>& scratch) const;

    std::span<const double> step_z(std::size_t l) const { return {step_z_.data() + l * dim_, dim_}; }
    std::span<const double> step_zz(std::size_t l) const {
        return {step_zz_.data() + l * dim_ * dim_, dim_ * dim_};
    }

    /// Dense copy with ZZ^{ab}_{ij} increased by delta.
    RoughPath bumped(std::size_t i, std::size_t j, std::size_t a, std::size_t b, double delta) const;
    /// Dilation Z -> cZ, ZZ -> c^2 ZZ.
    RoughPath scaled(double c) const;

private:
    friend RoughPath shift(const RoughPath& rp, std::size_t m);
    static RoughPath from_table(const TimeGrid& grid, std::size_t dim, double alpha, std::vector<double> step_z,
                                std::vector<double> step_zz, std::vector<double> table, std::size_t max_pairs);

    std::size_t row_offset(std::size_t i) const;
    std::size_t components() const { return dim_ + dim_ * dim_; }
    void fill_row(std::size_t i, double* out) const;
    void build_table();

    TimeGrid grid_;
    std::size_t dim_ = 0;
    double alpha_ = 0.5;
    std::size_t max_pairs_ = default_max_pairs;
    std::vector<double> step_z_;
    std::vector<double> step_zz_;
    std::vector<double> table_;
};

/// Alpha used when none is configured for a generator with Hurst index H.
double default_alpha(double hurst);

/// Throws invalid-parameter unless alpha lies in (1/3, 1/2] and, for fbm or
/// brownian samples, alpha < H - 1e-6.
void validate_alpha(double alpha, const PathSamples& z);

RoughPath lift_piecewise_linear(const PathSamples& z, double alpha,
                                std::size_t max_pairs = RoughPath::default_max_pairs);

struct ChenReport {
    double residual = 0.0;
    std::size_t i = 0, j = 0, k = 0, a = 0, b = 0;  ///< witness of the maximum
};

/// Max entrywise |ZZ_ik - ZZ_jk - ZZ_ij - Z_ij (x) Z_jk| over all triples i <= j <= k.
ChenReport check_chen(const RoughPath& rp);
/// Max entrywise |Z_ik - Z_ij - Z_jk| over all triples.
double additivity_residual(const RoughPath& rp);
/// Max entrywise |Sym(ZZ_ij) - 1/2 Z_ij (x) Z_ij| over all pairs.
double symmetry_residual(const RoughPath& rp);

struct HolderNorms {
    double z = 0.0;
    double zz = 0.0;
    double triple = 0.0;
};

/// Discrete Hoelder norms over pairs inside [t_{i0}, t_{i1}].
HolderNorms holder_norms(const RoughPath& rp, std::size_t i0, std::size_t i1);
HolderNorms holder_norms(const RoughPath& rp);

/// Hoelder triple norm of a - b on [t_{i0}, t_{i1}].
double rough_distance(const RoughPath& a, const RoughPath& b, std::size_t i0, std::size_t i1);
double rough_distance(const RoughPath& a, const RoughPath& b);

/// K independent fBm components with z(t0) = 0, exact covariance sampling.
PathSamples sample_fbm(double hurst, std::size_t dim, const TimeGrid& grid, std::uint64_t seed);
/// Increments of K independent fBm components on n steps of size dt, (n x K) row-major.
std::vector<double> sample_fbm_increments(double hurst, std::size_t dim, std::size_t n, double dt,
                                          std::uint64_t seed);

/// Rough path on grid.tail(m) with entries (i + m, j + m).
RoughPath shift(const RoughPath& rp, std::size_t m);

/// Piecewise-linear interpolation of z sampled at stride f, on the full grid.
PathSamples coarsen(const PathSamples& z, std::size_t factor);
/// z at stride f on the grid with n / f steps of length f dt.
PathSamples subsample(const PathSamples& z, std::size_t factor);

/// One lift per coarsening factor; factor 1 is the direct lift.
std::vector<RoughPath> wong_zakai_sequence(const PathSamples& z, const std::vector<std::size_t>& levels,
                                           double alpha,
                                           std::size_t max_pairs = RoughPath::default_max_pairs);

}  // namespace roughns
