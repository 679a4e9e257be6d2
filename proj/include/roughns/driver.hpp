/// @file driver.hpp
/// @brief Transport vector fields sigma_k and the rough drivers (A1, A2) they generate.
///
/// S_k phi = (sigma_k . grad) phi truncated to the lattice of phi. The drivers on a window
/// (s, t) are A1 = sum_k Z^k P S_k and A2 = sum_{l,k} ZZ^{lk} P S_k P S_l, with Q-side
/// companions where the outer P is replaced by Q.
#pragma once

#include "roughns/roughpath.hpp"
#include "roughns/spectral.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

namespace roughns {

/// Divergence-free real vector field with finitely many Fourier modes.
class TransportField {
public:
    explicit TransportField(const SpectralField& sigma);

    const SpectralField& field() const { return sigma_; }
    /// sum_k |sigma^(k)| (1 + |k|^2), the stand-in for bounded derivatives up to order two.
    double regularity_weight() const { return weight_; }
    bool is_constant() const { return modes_.size() == 1 && modes_[0] == Mode{0, 0, 0}; }

    /// out += c (sigma . grad) phi, truncated to the lattice of out.
    void apply_add(const SpectralField& phi, double c, SpectralField& out) const;
    SpectralField apply(const SpectralField& phi) const;

private:
    SpectralField sigma_;
    std::vector<Mode> modes_;
    std::vector<Vec3c> coeffs_;
    double weight_ = 0.0;
};

/// Constant field c.
TransportField constant_transport(const std::array<double, 3>& c);
/// Shear fields c (sin x3, cos x3, 0), c (0, sin x1, cos x1), c (cos x2, 0, sin x2), cycling for k >= 3.
TransportField shear_transport(std::size_t k, double c);

class DriverSet {
public:
    DriverSet() = default;
    explicit DriverSet(std::vector<TransportField> sigmas);

    std::size_t dim() const { return sigmas_ ? sigmas_->size() : 0; }
    const TransportField& sigma(std::size_t k) const { return (*sigmas_)[k]; }

private:
    std::shared_ptr<const std::vector<TransportField>> sigmas_;
};

/// The driver on one window. order 1 drops the second level.
class RoughDriverEval {
public:
    RoughDriverEval(const DriverSet& ds, std::vector<double> z, std::vector<double> zz, int order = 2);

    const DriverSet& drivers() const { return ds_; }
    std::span<const double> z() const { return z_; }
    std::span<const double> zz() const { return zz_; }
    int order() const { return order_; }
    bool is_zero() const;

    struct Action {
        SpectralField p1, p2, q1, q2;
    };
    /// A^{P,1} u, A^{P,2} u, A^{Q,1} u, A^{Q,2} u in one pass.
    Action apply(const SpectralField& u) const;
    SpectralField a1(const SpectralField& u) const;
    SpectralField a2(const SpectralField& u) const;
    /// Adjoints on divergence-free fields: A1* = -A1, A2* = sum ZZ^{lk} P S_l P S_k.
    SpectralField a1_adjoint(const SpectralField& phi) const;
    SpectralField a2_adjoint(const SpectralField& phi) const;

private:
    DriverSet ds_;
    std::vector<double> z_;
    std::vector<double> zz_;
    int order_ = 2;
};

/// Driver on the grid window (i, j).
RoughDriverEval build_driver(const DriverSet& ds, const RoughPath& rp, std::size_t i, std::size_t j, int order = 2);
/// Driver from explicit increments (Z: K entries, ZZ: K*K row-major).
RoughDriverEval driver_from_increments(const DriverSet& ds, std::vector<double> z, std::vector<double> zz,
                                       int order = 2);

/// Norm of phi -> Lambda^beta A Lambda^{-beta-order} phi on divergence-free fields of the
/// lattice, by power iteration from a seeded start.
struct OperatorNorms {
    double a1 = 0.0;   ///< |A1|_{H^{beta+1} -> H^beta}
    double a2 = 0.0;   ///< |A2|_{H^{beta+2} -> H^beta}
};
OperatorNorms driver_norms(const RoughDriverEval& d, const Lattice& lattice, double beta, int iterations = 60,
                           std::uint64_t seed = 1);

struct DriverBoundRow {
    std::size_t i = 0, j = 0;
    double beta = 0.0;
    double a1 = 0.0, a2 = 0.0;
    double ratio1 = 0.0;   ///< a1 / omega_Z^alpha
    double ratio2 = 0.0;   ///< a2 / omega_Z^{2 alpha}
};

struct DriverBoundsReport {
    double R = 0.0;                      ///< max(normZ, normZZ^{1/2}); omega_Z(s,t) = (t-s) R^{1/alpha}
    std::array<double, 3> m_hat{};       ///< max_k |P S_k|_{H^{beta+1} -> H^beta} for beta = 0, 1, 2
    std::vector<DriverBoundRow> rows;
    double max_ratio1 = 0.0, max_ratio2 = 0.0;
};

/// Norms for beta in {0, 1, 2} on the given windows.
DriverBoundsReport driver_bounds(const DriverSet& ds, const RoughPath& rp, const Lattice& lattice,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& windows,
                                 int iterations = 60);
/// Dyadic windows [m 2^l, (m+1) 2^l] of the grid, at most max_per_level per level.
std::vector<std::pair<std::size_t, std::size_t>> dyadic_windows(std::size_t n, std::size_t max_per_level);

}  // namespace roughns
