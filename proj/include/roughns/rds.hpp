/// @file rds.hpp
/// @brief Two-sided sampled noise with the grid shift theta, rough-path cocycle checks, and
/// the cocycle property of the selected solution map Phi.
#pragma once

#include "roughns/selection.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

namespace roughns {

/// A sample path on the two-sided grid {-half, ..., half} (in steps of dt) seen through a
/// shift offset. Increments read the shared samples directly, so theta is exact.
class NoisePoint {
public:
    NoisePoint() = default;
    /// samples holds 2 half + 1 points; point half is the origin.
    NoisePoint(const PathSamples& samples, std::size_t half, std::uint64_t seed);

    /// fBm (Brownian motion for H = 1/2) with K components on 2 half steps of length dt.
    static NoisePoint sample_fbm(double H, std::size_t K, double dt, std::size_t half, std::uint64_t seed);

    std::size_t dim() const { return dim_; }
    double dt() const { return dt_; }
    std::size_t half() const { return half_; }
    std::ptrdiff_t offset() const { return offset_; }
    std::uint64_t seed() const { return seed_; }
    Generator generator() const { return generator_; }
    double hurst() const { return hurst_; }

    /// z(j) - z(i) for grid indices relative to the shifted origin.
    double increment(std::ptrdiff_t i, std::ptrdiff_t j, std::size_t a) const;
    /// Samples z(start + m) - z(start), m = 0..n, on a grid starting at 0. Throws
    /// horizon-exceeded when the window leaves the sampled range.
    PathSamples window(std::ptrdiff_t start, std::size_t n) const;

    /// Copy with its own samples where the point at relative index i of component a moves by delta.
    NoisePoint corrupted(std::ptrdiff_t i, std::size_t a, double delta) const;

    bool operator==(const NoisePoint& o) const;

private:
    friend NoisePoint theta(const NoisePoint& omega, std::ptrdiff_t s);
    std::size_t absolute(std::ptrdiff_t i) const;

    std::shared_ptr<const std::vector<double>> values_;
    std::size_t dim_ = 0;
    double dt_ = 1.0;
    std::size_t half_ = 0;
    std::ptrdiff_t offset_ = 0;
    std::uint64_t seed_ = 0;
    Generator generator_ = Generator::user;
    double hurst_ = 0.0;
};

/// theta_s omega = omega(. + s) - omega(s); s in grid steps. Throws horizon-exceeded if the
/// new origin leaves the sampled range.
NoisePoint theta(const NoisePoint& omega, std::ptrdiff_t s);

struct RpCocycleResidual {
    double z = 0.0;
    double zz = 0.0;
    std::size_t i = 0, j = 0;   ///< window (relative to s) with the largest residual
};

/// max over 0 <= i < j <= t of |Z_{s+i,s+j}(omega) - Z_{i,j}(shifted)| and the ZZ analog,
/// with piecewise-linear lifts of omega on [0, s + t] and shifted on [0, t].
RpCocycleResidual cocycle_check_rp(const NoisePoint& omega, const NoisePoint& shifted, std::size_t s, std::size_t t,
                                   double alpha);
/// As above with shifted = theta(omega, s).
RpCocycleResidual cocycle_check_rp(const NoisePoint& omega, std::size_t s, std::size_t t, double alpha);

struct PhiConfig {
    EnsembleConfig ensemble;
    std::vector<FunctionalSpec> specs = default_specs(3);
    DriverSet drivers;
    std::size_t steps = 64;   ///< horizon of each ensemble in grid steps
    double alpha = 0.4;
    double tol_sel = 1e-9;
};

struct State {
    SpectralField u;
    double E = 0.0;
};

/// Phi(t, omega)[u0, E0] = (u(t), E(t-)) of the member selected from the ensemble built on
/// the lift of omega over [0, steps].
State phi(std::size_t t, const NoisePoint& omega, const SpectralField& u0, double E0, const PhiConfig& cfg);

/// |u_lhs - u_rhs|_{-1} + |E_lhs - E_rhs| for Phi(s + t, omega) against
/// Phi(t, theta_s omega) o Phi(s, omega).
double cocycle_residual_phi(std::size_t s, std::size_t t, const NoisePoint& omega, const SpectralField& u0, double E0,
                            const PhiConfig& cfg);

struct CocycleRow {
    std::uint64_t seed = 0;
    double s = 0.0, t = 0.0;
    double residual_z = 0.0, residual_zz = 0.0, residual_phi = 0.0;
};

/// Columns seed, s, t, residual_Z, residual_ZZ, residual_phi.
void write_csv(std::ostream& os, const std::vector<CocycleRow>& rows);

}  // namespace roughns
