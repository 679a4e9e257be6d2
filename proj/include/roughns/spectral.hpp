/// @file spectral.hpp
/// @brief Truncated Fourier fields on the 3-torus and the operators acting on them.
///
/// A field is f(x) = sum_k f^(k) e^{i k.x} over lattice modes with |k|_inf <= N.
/// Norms carry the volume factor (2 pi)^3, so |1|_0 equals the continuum L2 norm.
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace roughns {

using cplx = std::complex<double>;
using Vec3c = std::array<cplx, 3>;
using Mode = std::array<int, 3>;

inline constexpr double torus_volume = 248.05021344239853;  // (2 pi)^3

class Lattice {
public:
    Lattice() = default;
    explicit Lattice(int cutoff);

    int cutoff() const { return data_->cutoff; }
    std::size_t side() const { return data_->side; }
    std::size_t size() const { return data_->modes.size(); }
    const Mode& mode(std::size_t idx) const { return data_->modes[idx]; }
    double k2(std::size_t idx) const { return data_->k2[idx]; }
    bool contains(const Mode& k) const;
    /// Index of a mode that lies in the lattice (no check).
    std::size_t index(const Mode& k) const;
    std::size_t negated(std::size_t idx) const { return size() - 1 - idx; }
    /// True for the representative of {k, -k}: first nonzero component positive.
    bool canonical(std::size_t idx) const;
    /// Multipliers (1 + |k|^2)^{beta/2}, cached per beta.
    const std::vector<double>& multiplier(double beta) const;

    bool operator==(const Lattice& o) const { return cutoff() == o.cutoff(); }

private:
    struct Data {
        int cutoff = 0;
        std::size_t side = 0;
        std::vector<Mode> modes;
        std::vector<double> k2;
    };
    std::shared_ptr<const Data> data_;
};

class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(const Lattice& lattice);

    const Lattice& lattice() const { return lattice_; }
    std::size_t size() const { return c_.size(); }
    Vec3c& operator[](std::size_t idx) { return c_[idx]; }
    const Vec3c& operator[](std::size_t idx) const { return c_[idx]; }
    Vec3c& at(const Mode& k) { return c_[lattice_.index(k)]; }
    const Vec3c& at(const Mode& k) const { return c_[lattice_.index(k)]; }
    std::span<Vec3c> coeffs() { return c_; }
    std::span<const Vec3c> coeffs() const { return c_; }

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);
    /// this += s * o
    SpectralField& axpy(double s, const SpectralField& o);
    void set_zero();

    bool is_finite() const;

private:
    Lattice lattice_;
    std::vector<Vec3c> c_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Real L2 pairing (2 pi)^3 Re sum_k conj(a^(k)) . b^(k).
double inner(const SpectralField& a, const SpectralField& b);
/// (I - Delta)^{beta/2} weighted L2 norm.
double sobolev_norm(const SpectralField& f, double beta);
/// Pairing of (I - Delta)^{beta/2} f with (I - Delta)^{beta/2} g.
double sobolev_inner(const SpectralField& f, const SpectralField& g, double beta);
/// Max |k . f^(k)|.
double divergence_residual(const SpectralField& f);
/// Max |f^(-k) - conj(f^(k))|.
double conjugate_symmetry_residual(const SpectralField& f);
/// Max entrywise |a^(k) - b^(k)|.
double max_abs_diff(const SpectralField& a, const SpectralField& b);

SpectralField leray_project(const SpectralField& f);
SpectralField q_project(const SpectralField& f);
/// Sharp cutoff J^eta keeping modes with (1 + |k|^2)^{1/2} <= 1/eta, eta in (0, 1].
SpectralField smoothing(const SpectralField& f, double eta);
/// e^{t nu Delta} f.
SpectralField heat_propagate(const SpectralField& f, double t, double nu = 1.0);
/// Fourier multiplier (1 + |k|^2)^{s/2}.
SpectralField bessel_potential(const SpectralField& f, double s);
SpectralField laplacian(const SpectralField& f);
/// Copy onto another lattice, dropping modes that do not fit.
SpectralField restrict_to(const SpectralField& f, const Lattice& target);

/// a_cos cos(k.x) + a_sin sin(k.x); zero-mean unless k = 0.
SpectralField trig_field(const Lattice& lattice, const Mode& k, const std::array<double, 3>& a_cos,
                         const std::array<double, 3>& a_sin);
/// Real random field on modes with |k|_inf <= max_mode, Leray-projected if requested,
/// scaled to the given L2 norm (no scaling when norm <= 0).
SpectralField random_field(const Lattice& lattice, std::uint64_t seed, int max_mode, bool divergence_free,
                           double norm);

void write_csv(std::ostream& os, const SpectralField& f);
/// Lattice cutoff is the largest |k|_inf in the file unless min_cutoff is larger.
SpectralField read_field_csv(std::istream& is, int min_cutoff = 1);

/// Exact truncated quadratic products by zero-padded transforms (grid >= 3N + 1 points
/// per direction, so no aliased mode reaches the lattice). Holds scratch buffers; not
/// safe for concurrent use, one engine per thread.
class ProductEngine {
public:
    explicit ProductEngine(const Lattice& lattice);
    ~ProductEngine();
    ProductEngine(const ProductEngine&) = delete;
    ProductEngine& operator=(const ProductEngine&) = delete;

    const Lattice& lattice() const { return lattice_; }
    std::size_t grid_points() const { return m_; }

    /// (u . grad) v truncated to the lattice.
    SpectralField advect(const SpectralField& u, const SpectralField& v);
    /// div(u (x) u) truncated to the lattice; equals (u . grad) u for divergence-free u.
    SpectralField convect(const SpectralField& u);

private:
    /// Component comp of f (axis < 0) or of its derivative along axis, on the padded grid.
    void to_physical(const SpectralField& f, std::size_t comp, int axis, std::vector<double>& out);
    void to_spectral(const std::vector<double>& phys, std::vector<cplx>& lattice_coeffs);

    Lattice lattice_;
    std::size_t m_ = 0;
    struct Plans;
    std::unique_ptr<Plans> plans_;
    std::vector<std::size_t> slot_;   // r2c slot of each lattice mode with kz >= 0
};

/// Per-thread engine for the lattice.
ProductEngine& product_engine(const Lattice& lattice);

/// b(u, v, w) = int ((u . grad) v) . w.
double trilinear(const SpectralField& u, const SpectralField& v, const SpectralField& w);
/// B(u, u) split into its Leray part and gradient part.
struct Convection {
    SpectralField p;
    SpectralField q;
};
Convection convection_parts(const SpectralField& u);
/// B_P(u) = P[(u . grad) u].
SpectralField convection(const SpectralField& u);

}  // namespace roughns
