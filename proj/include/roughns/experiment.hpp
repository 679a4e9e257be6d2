/// @file experiment.hpp
/// @brief Validated experiment configuration, the experiment runners behind the command line
/// tool, and deterministic artifact emission.
#pragma once

#include "roughns/config.hpp"
#include "roughns/rds.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace roughns {

/// Known experiment kinds, in command line order.
const std::vector<std::string>& experiment_kinds();

struct SchemaKey {
    std::string key;
    std::string fallback;   ///< empty with required set: must be given (see description)
    std::string description;
};

/// Every accepted key with its documented default.
const std::vector<SchemaKey>& config_schema();

struct ExperimentConfig {
    std::string kind;
    int N = 4;
    double T = 1.0;
    std::size_t n = 256;
    std::string generator = "fbm";   ///< fbm, brownian or zero
    double H = 0.5;
    std::size_t K = 2;
    std::vector<std::uint64_t> seeds{1};
    double alpha = 0.4;

    std::string sigma_kind = "shear";   ///< shear or constant
    double sigma_amplitude = 0.2;
    std::vector<double> sigma_constant;   ///< 3 K numbers for the constant kind

    std::string init_kind = "random";   ///< random or mode
    std::uint64_t init_seed = 7;
    int init_max_mode = 2;
    double init_norm = 0.5;
    Mode init_k{1, 1, 0};
    std::array<double, 3> init_amplitude{0.0, 0.0, 1.0};

    SolveConfig solve;
    bool certify_remainder = true;
    CertifyOptions certify;

    std::vector<double> variants{0.0};   ///< extra dissipation per base member
    std::vector<double> closure;         ///< closure times
    std::size_t functionals = 3;
    double tol_sel = 1e-9;
    double tol_cmp = 1e-9;
    std::size_t max_members = 64;

    std::vector<std::size_t> wz_levels{8, 4, 2, 1};
    double wz_min_fraction = 0.8;

    std::vector<double> semigroup_t1, semigroup_t2;
    std::vector<double> rds_s, rds_t;
    bool rds_phi = true;

    double tol_chen = 1e-12;
    double tol_exact = 1e-3;
    double tol_rds = 1e-12;
    double tol_factor = 10.0;

    std::size_t workers = 1;

    /// Every schema key with its effective value.
    Config effective;

    DriverSet drivers() const;
    SpectralField initial() const;
    /// Noise path for a seed on the experiment grid (zero generator ignores the seed).
    PathSamples noise(std::uint64_t seed) const;
    /// Grid index of a time on the experiment grid; throws ConfigError unless it is a grid point.
    std::size_t step_of(double t, const std::string& field) const;
};

/// Validates the config against the schema for the given subcommand. Unknown keys, missing
/// required keys and malformed values throw ConfigError with the line and field.
ExperimentConfig parse_experiment(const Config& cfg, const std::string& kind);

struct Artifact {
    std::string name;      ///< file name, "<kind>_<table>.csv" or "<kind>_trace.txt"
    std::string content;
};

struct ExperimentResult {
    bool pass = true;
    std::vector<Artifact> artifacts;
    std::vector<std::string> summary;   ///< human-readable check lines
};

/// Runs seeds on cfg.workers threads; results are merged in seed order, so the output does
/// not depend on the worker count. Propagates BlowUp.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Re-runnable manifest: header comments (config hash, versions, seeds, outcome) followed by
/// the effective configuration.
std::string manifest_text(const ExperimentConfig& cfg, const ExperimentResult& result);

/// Writes manifest.txt and every artifact into dir (created if needed).
void write_artifacts(const std::string& dir, const ExperimentConfig& cfg, const ExperimentResult& result);

/// Versions of this library and of the linked numerical libraries.
std::string version_string();

}  // namespace roughns
