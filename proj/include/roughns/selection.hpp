/// @file selection.hpp
/// @brief Finite ensembles of certified trajectories, the energy order, Krylov functionals,
/// iterated argmin selection, and the semigroup check of the selected semiflow.
///
/// An ensemble holds members for the original data (offset 0) and the shift closure:
/// members at offset T are trajectories for the data (u(T), E(T-), shift(rp, T)).
#pragma once

#include "roughns/solver.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace roughns {

/// Solver settings that distinguish base members.
struct Variant {
    std::size_t substeps = 1;
    int order = 2;
    ExtraDissipation extra;
};

struct EnsembleConfig {
    SolveConfig solve;
    /// Empty means a single variant taken from solve.
    std::vector<Variant> variants;
    /// Grid indices T (0 < T < n) at which the ensemble is closed under shift and concatenation.
    std::vector<std::size_t> closure_steps;
    std::size_t max_members = 64;
    bool certify_members = true;
    CertifyOptions certify;
    double tol_cmp = 1e-9;
};

struct Member {
    std::size_t id = 0;
    std::string provenance;
    std::size_t offset = 0;   ///< grid index of the data this member solves for
    Trajectory traj;
    RoughPath rp;             ///< rough path on traj.grid
    bool certified = false;
};

struct Ensemble {
    SpectralField u0;
    double E0 = 0.0;
    RoughPath rp;
    DriverSet ds;
    double tol_cmp = 1e-9;
    std::vector<Member> members;
    std::vector<std::string> log;   ///< closure and certification events
    std::size_t dropped = 0;        ///< closure members not added because of max_members

    /// Ids of certified members at the given offset.
    std::vector<std::size_t> members_at(std::size_t offset) const;
    const Member& member(std::size_t id) const { return members.at(id); }
};

Ensemble build_ensemble(const SpectralField& u0, double E0, const RoughPath& rp, const DriverSet& ds,
                        const EnsembleConfig& cfg);

/// S_T: the trajectory from grid index T on, over grid.tail(T). The energy datum at the new
/// origin is E(T-).
Trajectory shift_traj(const Trajectory& traj, std::size_t T);

/// traj1 on [0, T] followed by traj2, which must live on traj1.grid.tail(T), start from
/// traj1.u(T) and carry an energy datum no larger than traj1.E(T-). Throws
/// invalid-continuation otherwise.
Trajectory concat(const Trajectory& traj1, std::size_t T, const Trajectory& traj2, double tol = 1e-9);

/// u^{P,nat}_{st} for s < T < t from the two pieces through the operator Chen relation:
/// R_sT + R_Tt + A2_Tt delta u_sT + A1_Tt (delta u_sT - A1_sT u_s).
SpectralField straddle_remainder(const Trajectory& traj, const RoughPath& rp, const DriverSet& ds, std::size_t s,
                                 std::size_t T, std::size_t t);

enum class Order { equal, dominated_1, dominated_2, incomparable };
std::string to_string(Order o);

/// Pointwise comparison of the energy data on a common grid: dominated_1 means traj1 < traj2.
Order compare(const Trajectory& a, const Trajectory& b, double tol_cmp = 1e-9);

enum class BetaKind { tanh, atan };

struct FunctionalSpec {
    double lambda = 1.0;
    /// 0 is the total energy; n >= 1 is the n-th divergence-free real Fourier mode.
    std::size_t mode = 0;
    BetaKind beta = BetaKind::tanh;
    double beta_scale = 1.0;

    double apply_beta(double x) const;
    double beta_sup() const;
};

/// Real divergence-free L^2-normalised basis field number n >= 1: modes ordered by |k| then
/// lexicographically over the canonical half lattice, then two polarisations, then cos and sin.
SpectralField mode_basis(const Lattice& lattice, std::size_t n);

/// lambda_k for k = 1, 2, ...: 1, 1/2, 2, 1/3, 3, ...
double lambda_sequence(std::size_t k);

/// First count specs of the diagonal enumeration of (k, n), k >= 1, n >= 0, starting at (1, 0).
std::vector<FunctionalSpec> default_specs(std::size_t count);

struct KrylovValue {
    double value = 0.0;   ///< trapezoid integral over the grid
    double tail = 0.0;    ///< bound |beta|_inf e^{-lambda T} / lambda on the omitted tail
};

/// int_0^T e^{-lambda t} F(u(t), E(t)) dt with t measured from the first grid point.
KrylovValue krylov_functional(const Trajectory& traj, const FunctionalSpec& spec);

enum class SelectionFlag { unique, unique_up_to_tolerance, non_unique };
std::string to_string(SelectionFlag f);

struct SelectionStage {
    std::size_t spec_index = 0;
    std::vector<std::size_t> candidates;
    std::vector<double> values;
    std::vector<std::size_t> survivors;
};

struct SelectionResult {
    std::size_t id = 0;
    SelectionFlag flag = SelectionFlag::unique;
    std::vector<SelectionStage> trace;
};

/// Iterated argmin over the certified members at the given offset; ties within
/// tol_sel (1 + |I|) survive, and the smallest id among final survivors is returned.
SelectionResult select(const Ensemble& ens, const std::vector<FunctionalSpec>& specs, std::size_t offset = 0,
                       double tol_sel = 1e-9);
/// Restricts the candidates to the given ids.
SelectionResult select_among(const Ensemble& ens, const std::vector<std::size_t>& ids,
                             const std::vector<FunctionalSpec>& specs, double tol_sel = 1e-9);

/// No other certified member at the same offset strictly dominates the member.
bool is_admissible(const Ensemble& ens, std::size_t id);

/// |u_a - u_b|_{-1} + |E_a - E_b| between U(t1 + t2) and U applied to the state at t1 with
/// the shifted rough path, evaluated at t2. Both selections use specs; t1 must be a
/// closure step of the ensemble (or zero).
double semigroup_residual(const Ensemble& ens, const std::vector<FunctionalSpec>& specs, std::size_t t1,
                          std::size_t t2, double tol_sel = 1e-9);

/// Structured text: one block per stage with candidate ids, values and survivors.
void write_trace(std::ostream& os, const Ensemble& ens, const SelectionResult& r,
                 const std::vector<FunctionalSpec>& specs);
/// Columns id, provenance, offset, certified, E0, final_energy.
void write_manifest(std::ostream& os, const Ensemble& ens);

}  // namespace roughns
