/// @file roughns_cli.cpp
/// @brief Command line experiment runner: roughns <kind> --config <path> [--out <dir>] [--seed-override <u64>].
///
/// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error, 3 numerical blow-up.

#include "roughns/errors.hpp"
#include "roughns/experiment.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

int run(const std::string& kind, const std::string& config_path, const std::string& out_dir,
        const std::optional<std::uint64_t>& seed) {
    using namespace roughns;
    ExperimentConfig cfg;
    try {
        Config raw = Config::load(config_path);
        if (seed) raw.set("noise.seeds", std::to_string(*seed));
        cfg = parse_experiment(raw, kind);
    } catch (const ConfigError& e) {
        std::cerr << config_path << ": " << e.what() << '\n';
        return 2;
    }
    try {
        const ExperimentResult res = run_experiment(cfg);
        write_artifacts(out_dir, cfg, res);
        for (const std::string& line : res.summary) std::cout << kind << ": " << line << '\n';
        std::cout << kind << ": " << (res.pass ? "PASS" : "FAIL") << " (artifacts in " << out_dir << ")\n";
        return res.pass ? 0 : 1;
    } catch (const BlowUp& e) {
        std::cerr << kind << ": blow-up at step " << e.step() << ": " << e.what() << '\n';
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << config_path << ": " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << kind << ": " << e.what() << '\n';
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rough Navier-Stokes experiments on the 3-torus"};
    app.require_subcommand(1);
    std::string config_path, out_dir = ".";
    std::optional<std::uint64_t> seed;
    for (const std::string& kind : roughns::experiment_kinds()) {
        CLI::App* sub = app.add_subcommand(kind, "run the " + kind + " experiment");
        sub->add_option("--config", config_path, "flat key = value configuration file")->required();
        sub->add_option("--out", out_dir, "output directory for manifest.txt and tables");
        sub->add_option("--seed-override", seed, "replace noise.seeds by this single seed");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    for (const CLI::App* sub : app.get_subcommands()) return run(sub->get_name(), config_path, out_dir, seed);
    return 2;
}
