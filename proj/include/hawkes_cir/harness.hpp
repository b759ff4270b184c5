#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hawkes_cir/ldp.hpp"
#include "hawkes_cir/model_params.hpp"
#include "hawkes_cir/simulator.hpp"

namespace hawkes_cir::harness {

/// Monte Carlo sizes and tolerances of the validation suite.
struct ValidationBudget {
    std::size_t moment_paths = 20'000;
    double moment_t = 1.0;
    double moment_dt = 1e-3;
    std::size_t lln_paths = 10'000;
    double lln_t = 100.0;
    std::size_t clt_paths = 20'000;
    double clt_t = 50.0;
    std::size_t bond_paths = 10'000;
    double n_se = 3.0;
    std::size_t legendre_grid_points = 1'000'000;
    double legendre_grid_lo = -20.0;
    std::size_t convexity_grid_points = 200;
    unsigned threads = 0;
};

/// Fully resolved command configuration: JSON file values overridden by flags.
struct RunConfig {
    ModelParams params = reference_params();
    sim::SimConfig sim;
    ldp::Functional functional = ldp::Functional::IntegralR;
    std::vector<double> theta_grid;
    std::vector<double> x_grid;
    std::vector<double> tau_grid;
    std::vector<double> t_grid;
    std::vector<double> dt_grid;
    double tol = 1e-10;
    std::string output_dir;
    ValidationBudget budget;

    RunConfig() { sim.r0 = 1.0; }
};

/// Reads a RunConfig document:
///   {"params": {...}, "sim": {"t_end", "dt_max", "r0", "seed", "n_paths",
///    "jump_mode"}, "seed", "functional", "theta_grid", "x_grid", "tau_grid",
///    "t_grid", "dt_grid", "tol", "output_dir", "validation": {budget fields}}
/// Every key is optional. Throws Error(ConfigError) on malformed input.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Checks grids are finite and nonempty where referenced and that params
/// validate. Throws Error.
void check_grid(const std::vector<double>& grid, const char* name);

/// One verified claim. Every check names the oracle it was compared to.
struct Check {
    int criterion = 0;
    std::string name;
    std::string oracle;
    double target = 0.0;
    double estimate = 0.0;
    std::optional<double> standard_error;
    std::optional<double> tolerance;
    bool pass = false;
};

struct ValidationReport {
    std::string suite;
    std::uint64_t seed = 0;
    ModelParams params;
    std::vector<Check> checks;
    bool pass = false;
    /// Wall-clock seconds per stage; only serialized on request.
    std::map<std::string, double> timings;

    /// Conjunction of the checks tagged with `criterion`.
    bool criterion_pass(int criterion) const;
};

ValidationReport run_validation(const ModelParams& params, std::uint64_t seed, const ValidationBudget& budget = {});

nlohmann::json to_json(const Check& check);
nlohmann::json to_json(const ValidationReport& report, bool include_timing = false);

/// Entry point of the hawkes-cir tool. args excludes the program name.
/// Returns 0 on success, 1 on a failed validation, 2 on a config error; error
/// details go to `err` as a JSON object.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hawkes_cir::harness
