/// @file solver.hpp
/// @brief Galerkin rough time stepping, remainders, and weak-solution certificates.
///
/// One step over [s, s + h] maps u to e^{h nu Delta} R (u - h B_P(u)), where R is the rough
/// increment. The exponential scheme uses R = exp(A1 + Anti-part of A2), whose second-order
/// truncation is I + A1 + A2 and which is orthogonal on divergence-free fields; the Davie
/// scheme uses R = I + A1 + A2 literally.
#pragma once

#include "roughns/driver.hpp"
#include "roughns/roughpath.hpp"
#include "roughns/spectral.hpp"
#include "roughns/variation.hpp"

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace roughns {

enum class RoughScheme { exponential, davie };

RoughScheme parse_scheme(const std::string& name);
std::string to_string(RoughScheme s);

/// explicit: u - h B_P(u). midpoint: v = u - h B_P((u + v)/2) by fixed-point iteration,
/// which conserves 1/2|u|^2 exactly.
enum class ConvectionScheme { explicit_euler, midpoint };

ConvectionScheme parse_convection(const std::string& name);
std::string to_string(ConvectionScheme s);

/// Viscosity multiplier 1 + eps on substeps starting in [t_begin, t_end).
struct ExtraDissipation {
    double eps = 0.0;
    double t_begin = 0.0;
    double t_end = std::numeric_limits<double>::infinity();
};

struct SolveConfig {
    int cutoff = 4;
    std::size_t substeps = 1;
    int order = 2;
    RoughScheme scheme = RoughScheme::exponential;
    ConvectionScheme convection = ConvectionScheme::explicit_euler;
    /// Longest remainder window in grid steps; 0 computes every pair.
    std::size_t remainder_window = 0;
    ExtraDissipation extra;
    double blowup_factor = 1e3;
    bool keep_pressure = true;

    void validate() const;
};

/// Absolute energy tolerance 1e-6 (1 + E0).
double energy_tolerance(double E0);

struct StepOutput {
    SpectralField u;
    double dissipation = 0.0;   ///< int |grad u|^2 over the step
    SpectralField pressure;     ///< increment of the pressure-gradient path
};

/// One step of length h with the given driver increment and viscosity nu.
StepOutput advance(const SpectralField& u, const RoughDriverEval& d, double h, double nu, RoughScheme scheme,
                   ConvectionScheme convection = ConvectionScheme::explicit_euler, bool with_pressure = true);
/// u_{i+1} only.
SpectralField step(const SpectralField& u, const RoughDriverEval& d, double h, const SolveConfig& cfg);

/// Applies the rough increment R to v (see file comment).
SpectralField rough_increment(const RoughDriverEval& d, const SpectralField& v, RoughScheme scheme);

/// Splits a step increment (Z, ZZ) into m equal pieces whose Chen product is (Z, ZZ).
void subdivide_increment(std::span<const double> z, std::span<const double> zz, std::size_t m,
                         std::vector<double>& sub_z, std::vector<double>& sub_zz);

struct Trajectory {
    TimeGrid grid;
    std::vector<SpectralField> u;
    std::vector<double> E;             ///< energy datum, non-increasing
    std::vector<double> energy;        ///< 1/2 |u_i|_0^2
    std::vector<SpectralField> pressure;
    std::vector<double> dissipation;   ///< per step, n entries
    double E0 = 0.0;

    std::size_t steps() const { return grid.n; }
    /// E(t_i -) read as E at the previous grid point; the energy datum E0 at i = 0.
    double E_left(std::size_t i) const { return i == 0 ? E0 : E[i - 1]; }
    /// Sum of dissipation over steps [0, i).
    double dissipation_until(std::size_t i) const;
};

/// Runs the scheme over the grid of rp. Throws invalid-data if 1/2|u0|^2 > E0 and
/// BlowUp on non-finite coefficients or |u|_0 > blowup_factor |u0|_0.
Trajectory solve(const SpectralField& u0, double E0, const RoughPath& rp, const DriverSet& ds,
                 const SolveConfig& cfg);

/// Columns t, E, energy_l2, diss_cum.
void write_csv(std::ostream& os, const Trajectory& traj);

/// Remainder tables on all pairs with j - i <= window.
struct RemainderLedger {
    TimeGrid grid;
    double p = 0.0;
    std::size_t window = 0;
    TwoIndexMap natural;     ///< |u^{P,nat}_{ij}|_{-3}
    TwoIndexMap sharp;       ///< |u^sharp_{ij}|_{-2}, u^sharp = delta u - delta mu - A1 u_i
    TwoIndexMap probe_sup;   ///< sup over probes of |u^{P,nat}_{ij}(phi)| / |phi|_3
    bool has_probes = false;
    Control omega;           ///< canonical p/3-variation control of natural on computed pairs

    bool computed(std::size_t i, std::size_t j) const { return j - i <= window; }
    double max_one_step() const;
};

/// u^{P,nat}_{ij} as a field: delta u + int (B_P(u) - Delta u) dr - (A1 + A2)_{ij} u_i, with
/// the time integral by the composite trapezoid rule on the grid.
SpectralField remainder_field(const Trajectory& traj, const RoughPath& rp, const DriverSet& ds, std::size_t i,
                              std::size_t j);

RemainderLedger remainder(const Trajectory& traj, const RoughPath& rp, const DriverSet& ds,
                          const std::vector<SpectralField>& probes = {}, std::size_t window = 0);

struct CertifyOptions {
    double L = 1.0;         ///< windows with varpi(s,t) <= L are certified
    double L_tilde = 1.0;   ///< smallness omega_A(s,t) <= L_tilde for the shape ratio
    double tol_monotone = 1e-9;
    double tol_cone = 1e-9;
    /// Energy tolerance; negative means energy_tolerance(E0).
    double tol_energy = -1.0;
};

struct ClauseResult {
    bool pass = true;
    double worst = 0.0;     ///< largest violation (or largest checked quantity when passing)
    std::size_t i = 0, j = 0;
};

struct CertificateReport {
    ClauseResult regularity;        ///< (i) finite L^2 H^1 and L^inf H^0 norms, divergence-free
    ClauseResult energy_identity;   ///< (ii) E = 1/2|u|^2 for t > 0, 1/2|u|^2 <= E
    ClauseResult energy_inequality; ///< (iii) E non-increasing and windowed energy inequality
    ClauseResult remainder_bound;   ///< (iv)
    double sup_l2 = 0.0, int_h1 = 0.0;
    double min_energy_slack = 0.0;  ///< min over i of E0 + tol - 1/2|u_i|^2 - int_0^{t_i} |grad u|^2
    std::size_t monotone_violations = 0;
    double m_hat = 0.0, R = 0.0, p = 0.0;
    double fitted_c = 0.0;          ///< max |u^{P,nat}|_{-3} / varpi^{3/p} on certified windows
    double shape_ratio = 0.0;       ///< max omega_{P,nat} / remainder-shape bound on windows with omega_A <= L_tilde
    std::size_t certified_windows = 0, shape_windows = 0;

    bool all_pass() const {
        return regularity.pass && energy_identity.pass && energy_inequality.pass && remainder_bound.pass;
    }
    /// key=value lines.
    void write(std::ostream& os) const;
};

/// varpi(s,t) = omega_A(s,t) + (t - s) with omega_A = (t - s) (M R)^{1/alpha}.
double varpi(double m_hat, double R, double alpha, double dt_span);

CertificateReport certify(const Trajectory& traj, const RemainderLedger& ledger, const RoughPath& rp,
                          const DriverSet& ds, const CertifyOptions& opts = {});

/// Only the energy clauses (ii) and (iii) and the energy-balance slack.
CertificateReport certify_energy(const Trajectory& traj, const CertifyOptions& opts = {});

struct WzRow {
    std::size_t factor = 1;
    double sup_hm1 = 0.0;     ///< sup_i |u^f_i - u^1_i|_{-1}
    double energy_l1 = 0.0;   ///< trapezoid int |E^f - E^1| dt
};

/// Solves once per Wong-Zakai level and compares with the finest (factor 1) level.
std::vector<WzRow> wz_convergence(const SpectralField& u0, double E0, const PathSamples& z, const DriverSet& ds,
                                  const std::vector<std::size_t>& levels, double alpha, const SolveConfig& cfg);

/// sup_i |a_i - b_i|_{-1} and the trapezoid L^1 distance of the energy data.
double sup_distance_hm1(const Trajectory& a, const Trajectory& b);
double energy_l1_distance(const Trajectory& a, const Trajectory& b);

}  // namespace roughns
