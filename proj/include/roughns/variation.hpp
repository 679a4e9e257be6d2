/// @file variation.hpp
/// @brief Two-index maps on a grid, controls and p-variation.
#pragma once

#include "roughns/roughpath.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace roughns {

/// Packed upper-triangular table over grid pairs (i, j), i <= j.
class PairTable {
public:
    PairTable() = default;
    explicit PairTable(const TimeGrid& grid, double fill = 0.0);

    const TimeGrid& grid() const { return grid_; }
    std::size_t points() const { return grid_.n + 1; }

    double operator()(std::size_t i, std::size_t j) const { return v_[offset(i) + (j - i)]; }
    double& at(std::size_t i, std::size_t j) { return v_[offset(i) + (j - i)]; }
    /// Entries (i, i), (i, i+1), ..., (i, n).
    std::span<const double> row(std::size_t i) const { return {v_.data() + offset(i), grid_.n + 1 - i}; }
    std::span<double> row(std::size_t i) { return {v_.data() + offset(i), grid_.n + 1 - i}; }

    /// Fills every pair from f(i, j).
    void assign(const std::function<double(std::size_t, std::size_t)>& f);

private:
    std::size_t offset(std::size_t i) const { return i * (grid_.n + 1) - i * (i - 1) / 2; }

    TimeGrid grid_;
    std::vector<double> v_;
};

/// Norms |g_ij| of a two-index map with values in a normed space.
class TwoIndexMap : public PairTable {
public:
    using PairTable::PairTable;
    static TwoIndexMap from_function(const TimeGrid& grid, const std::function<double(std::size_t, std::size_t)>& f);
    /// |z_j - z_i| in the Euclidean norm of R^K.
    static TwoIndexMap from_increments(const PathSamples& z);
    /// Max-norm of the first level Z_ij.
    static TwoIndexMap from_first_level(const RoughPath& rp);
};

class Control : public PairTable {
public:
    using PairTable::PairTable;
    static Control from_function(const TimeGrid& grid, const std::function<double(std::size_t, std::size_t)>& f);
    /// w(i, j) = rate * (t_j - t_i).
    static Control linear(const TimeGrid& grid, double rate);
};

Control operator+(const Control& a, const Control& b);
/// a^ea * b^eb pairwise; a control whenever ea + eb >= 1 with ea, eb >= 0.
Control product(const Control& a, double ea, const Control& b, double eb);

/// Sup over grid partitions of (sum |g|^p)^{1/p} on [t_{i0}, t_{i1}].
double p_variation(const TwoIndexMap& g, double p, std::size_t i0, std::size_t i1);
double p_variation(const TwoIndexMap& g, double p);

/// w(i, j) = p_variation(g, p, i, j)^p. Exponents in (0, 1) are accepted so
/// that remainders can be measured with exponent p/3.
Control control_from_variation(const TwoIndexMap& g, double p);

/// As control_from_variation, counting only pairs for which admissible(i, j) holds.
Control control_from_variation(const TwoIndexMap& g, double p,
                               const std::function<bool(std::size_t, std::size_t)>& admissible);

struct ControlCheck {
    bool ok = true;
    double worst = 0.0;  ///< largest w(i,j) + w(j,k) - w(i,k), or diagonal/sign defect
    std::size_t i = 0, j = 0, k = 0;
};

ControlCheck is_control(const Control& w, double tol = 1e-12);

struct LocalSeminorm {
    double value = 0.0;
    double c = 0.0;
    bool empty_window = false;
};

/// Restricted-pair certificate on [t_{i0}, t_{i1}] over pairs with varpi(i, j) <= L.
LocalSeminorm local_variation_seminorm(const TwoIndexMap& g, double p, const Control& varpi, double L,
                                       std::size_t i0, std::size_t i1);
LocalSeminorm local_variation_seminorm(const TwoIndexMap& g, double p, const Control& varpi, double L);

}  // namespace roughns
