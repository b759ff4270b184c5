#include <cmath>
#include <fstream>
#include <string>

#include "hawkes_cir/error.hpp"
#include "hawkes_cir/harness.hpp"

namespace hawkes_cir::harness {

namespace {

std::vector<double> read_grid(const nlohmann::json& j, const char* key) {
    if (!j.is_array()) throw Error(Errc::ConfigError, key, std::string("'") + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw Error(Errc::ConfigError, key, std::string("'") + key + "' must contain numbers only");
        out.push_back(v.get<double>());
    }
    check_grid(out, key);
    return out;
}

double read_number(const nlohmann::json& j, const char* key) {
    if (!j.is_number()) throw Error(Errc::ConfigError, key, std::string("'") + key + "' must be a number");
    return j.get<double>();
}

}  // namespace

void check_grid(const std::vector<double>& grid, const char* name) {
    if (grid.empty()) throw Error(Errc::ConfigError, name, std::string("grid '") + name + "' is empty");
    for (double v : grid) {
        if (!std::isfinite(v)) throw Error(Errc::ConfigError, name, std::string("grid '") + name + "' has a non-finite entry");
    }
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig cfg) {
    if (!j.is_object()) throw Error(Errc::ConfigError, "", "config must be a JSON object");
    if (auto it = j.find("params"); it != j.end()) cfg.params = params_from_json(*it, cfg.params);

    if (auto it = j.find("sim"); it != j.end()) {
        const auto& s = *it;
        if (!s.is_object()) throw Error(Errc::ConfigError, "sim", "'sim' must be an object");
        if (s.contains("t_end")) cfg.sim.t_end = read_number(s["t_end"], "t_end");
        if (s.contains("dt_max")) cfg.sim.dt_max = read_number(s["dt_max"], "dt_max");
        if (s.contains("r0")) cfg.sim.r0 = read_number(s["r0"], "r0");
        if (s.contains("seed")) {
            if (!s["seed"].is_number_unsigned()) throw Error(Errc::ConfigError, "seed", "'seed' must be a nonnegative integer");
            cfg.sim.seed = s["seed"].get<std::uint64_t>();
        }
        if (s.contains("n_paths")) {
            if (!s["n_paths"].is_number_unsigned()) throw Error(Errc::ConfigError, "n_paths", "'n_paths' must be a positive integer");
            cfg.sim.n_paths = s["n_paths"].get<std::size_t>();
        }
        if (s.contains("jump_mode")) {
            auto mode = s["jump_mode"].get<std::string>();
            if (mode == "thinning") cfg.sim.jump_mode = sim::JumpMode::Thinning;
            else if (mode == "grid") cfg.sim.jump_mode = sim::JumpMode::GridBernoulli;
            else throw Error(Errc::ConfigError, "jump_mode", "jump_mode must be 'thinning' or 'grid'");
        }
    }
    if (auto it = j.find("seed"); it != j.end()) {
        if (!it->is_number_unsigned()) throw Error(Errc::ConfigError, "seed", "'seed' must be a nonnegative integer");
        cfg.sim.seed = it->get<std::uint64_t>();
    }
    if (auto it = j.find("functional"); it != j.end()) {
        auto f = it->get<std::string>();
        if (f == "integral") cfg.functional = ldp::Functional::IntegralR;
        else if (f == "counts") cfg.functional = ldp::Functional::Counts;
        else throw Error(Errc::ConfigError, "functional", "functional must be 'integral' or 'counts'");
    }
    if (j.contains("theta_grid")) cfg.theta_grid = read_grid(j["theta_grid"], "theta_grid");
    if (j.contains("x_grid")) cfg.x_grid = read_grid(j["x_grid"], "x_grid");
    if (j.contains("tau_grid")) cfg.tau_grid = read_grid(j["tau_grid"], "tau_grid");
    if (j.contains("t_grid")) cfg.t_grid = read_grid(j["t_grid"], "t_grid");
    if (j.contains("dt_grid")) cfg.dt_grid = read_grid(j["dt_grid"], "dt_grid");
    if (j.contains("tol")) cfg.tol = read_number(j["tol"], "tol");
    if (auto it = j.find("output_dir"); it != j.end()) {
        if (!it->is_string()) throw Error(Errc::ConfigError, "output_dir", "'output_dir' must be a string");
        cfg.output_dir = it->get<std::string>();
    }
    if (auto it = j.find("validation"); it != j.end()) {
        const auto& v = *it;
        if (!v.is_object()) throw Error(Errc::ConfigError, "validation", "'validation' must be an object");
        auto count = [&](const char* key, std::size_t& slot) {
            if (!v.contains(key)) return;
            if (!v[key].is_number_unsigned() || v[key].get<std::size_t>() < 2) {
                throw Error(Errc::ConfigError, key, std::string("'") + key + "' must be an integer >= 2");
            }
            slot = v[key].get<std::size_t>();
        };
        auto positive = [&](const char* key, double& slot) {
            if (!v.contains(key)) return;
            slot = read_number(v[key], key);
            if (!(slot > 0.0)) throw Error(Errc::ConfigError, key, std::string("'") + key + "' must be positive");
        };
        count("moment_paths", cfg.budget.moment_paths);
        count("lln_paths", cfg.budget.lln_paths);
        count("clt_paths", cfg.budget.clt_paths);
        count("bond_paths", cfg.budget.bond_paths);
        count("legendre_grid_points", cfg.budget.legendre_grid_points);
        count("convexity_grid_points", cfg.budget.convexity_grid_points);
        positive("moment_t", cfg.budget.moment_t);
        positive("moment_dt", cfg.budget.moment_dt);
        positive("lln_t", cfg.budget.lln_t);
        positive("clt_t", cfg.budget.clt_t);
        positive("n_se", cfg.budget.n_se);
    }
    return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ConfigError, "config", "cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ConfigError, "config", std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return config_from_json(j, std::move(base));
}

}  // namespace hawkes_cir::harness
