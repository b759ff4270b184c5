#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hawkes_cir/analytics.hpp"
#include "hawkes_cir/csv.hpp"
#include "hawkes_cir/error.hpp"
#include "hawkes_cir/harness.hpp"
#include "hawkes_cir/ldp.hpp"
#include "hawkes_cir/ode_engine.hpp"
#include "hawkes_cir/simulator.hpp"

namespace hawkes_cir::harness {

namespace {

/// Flag values; unset entries leave the config file (or default) in place.
struct Overrides {
    std::string config_path;
    std::optional<double> a, b, c, alpha, beta, sigma;
    std::optional<double> t_end, dt_max, r0, tol;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n_paths;
    std::optional<std::string> jump_mode, functional, output_dir;
    std::vector<double> theta, x, tau, t, dt;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON run configuration");
    cmd->add_option("--a", o.a, "jump size");
    cmd->add_option("--b", o.b, "mean-reversion speed");
    cmd->add_option("--c", o.c, "reversion level");
    cmd->add_option("--alpha", o.alpha, "baseline intensity");
    cmd->add_option("--beta", o.beta, "intensity sensitivity");
    cmd->add_option("--sigma", o.sigma, "diffusion volatility");
    cmd->add_option("--r0", o.r0, "initial rate");
    cmd->add_option("--output-dir", o.output_dir, "directory for written artifacts");
}

RunConfig resolve(const Overrides& o) {
    RunConfig cfg;
    if (!o.config_path.empty()) cfg = load_config(o.config_path, cfg);
    auto set = [](const auto& opt, auto& slot) {
        if (opt) slot = *opt;
    };
    set(o.a, cfg.params.a);
    set(o.b, cfg.params.b);
    set(o.c, cfg.params.c);
    set(o.alpha, cfg.params.alpha);
    set(o.beta, cfg.params.beta);
    set(o.sigma, cfg.params.sigma);
    set(o.t_end, cfg.sim.t_end);
    if (o.dt_max) cfg.sim.dt_max = *o.dt_max;
    set(o.r0, cfg.sim.r0);
    set(o.tol, cfg.tol);
    set(o.seed, cfg.sim.seed);
    set(o.n_paths, cfg.sim.n_paths);
    set(o.output_dir, cfg.output_dir);
    if (o.jump_mode) {
        if (*o.jump_mode == "thinning") cfg.sim.jump_mode = sim::JumpMode::Thinning;
        else if (*o.jump_mode == "grid") cfg.sim.jump_mode = sim::JumpMode::GridBernoulli;
        else throw Error(Errc::ConfigError, "jump-mode", "--jump-mode must be 'thinning' or 'grid'");
    }
    if (o.functional) {
        if (*o.functional == "integral") cfg.functional = ldp::Functional::IntegralR;
        else if (*o.functional == "counts") cfg.functional = ldp::Functional::Counts;
        else throw Error(Errc::ConfigError, "functional", "--functional must be 'integral' or 'counts'");
    }
    auto grid = [](const std::vector<double>& flag, std::vector<double>& slot, const char* name) {
        if (!flag.empty()) slot = flag;
        if (!slot.empty()) check_grid(slot, name);
    };
    grid(o.theta, cfg.theta_grid, "theta");
    grid(o.x, cfg.x_grid, "x");
    grid(o.tau, cfg.tau_grid, "tau");
    grid(o.t, cfg.t_grid, "t");
    grid(o.dt, cfg.dt_grid, "dt");
    cfg.params = validate(cfg.params);
    return cfg;
}

std::vector<double> or_default(const std::vector<double>& grid, std::vector<double> fallback) {
    return grid.empty() ? fallback : grid;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

/// Writes `content` to output_dir/name when an output directory is set.
void emit_file(const RunConfig& cfg, const std::string& name, const std::string& content) {
    if (cfg.output_dir.empty()) return;
    std::filesystem::path dir(cfg.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error(Errc::ConfigError, "output_dir", "cannot write to " + (dir / name).string());
    f << content;
}

void write_ode_csv(std::ostream& out, const ode::OdeSolution& sol) {
    csv_row(out, "t", "A", "B");
    for (std::size_t i = 0; i < sol.times.size(); ++i) csv_row(out, sol.times[i], sol.A[i], sol.B[i]);
}

nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

int cmd_simulate(const RunConfig& cfg, std::size_t dump, std::ostream& out) {
    sim::SimConfig sc = cfg.sim;
    sc.record_path = false;
    auto batch = sim::simulate_batch(cfg.params, sc);
    auto limits = analytics::limit_constants(cfg.params);
    batch.report.at("time_avg_rate").compare(limits.lln_integral);
    batch.report.at("event_rate").compare(limits.lln_counts);
    batch.report.at("compensator_gap").compare(0.0);

    nlohmann::json report = sim::to_json(batch.report);
    report["params"] = params_to_json(cfg.params);
    report["jump_mode"] = std::string(sim::to_string(sc.jump_mode));
    const std::string text = report.dump(2) + "\n";

    if (!cfg.output_dir.empty()) {
        sim::SimConfig rec = sc;
        rec.record_path = true;
        std::vector<sim::PathSample> dumped;
        for (std::size_t i = 0; i < std::min(dump, sc.n_paths); ++i) dumped.push_back(sim::simulate_path(cfg.params, rec, i));
        std::ostringstream csv;
        sim::write_paths_csv(csv, dumped);
        emit_file(cfg, "paths.csv", csv.str());
        emit_file(cfg, "mc_report.json", text);
    }
    out << text;
    return 0;
}

int cmd_moments(const RunConfig& cfg, bool limits_only, std::ostream& out) {
    const auto& p = cfg.params;
    if (limits_only) {
        auto lc = analytics::limit_constants(p);
        nlohmann::json j = {{"lln_integral", lc.lln_integral},
                            {"lln_counts", lc.lln_counts},
                            {"clt_var_integral", lc.clt_var_integral},
                            {"clt_var_counts", lc.clt_var_counts},
                            {"clt_var_counts_closed_form", lc.clt_var_counts_closed_form},
                            {"clt_var_counts_uncorrected", number_or_null(lc.clt_var_counts_uncorrected)},
                            {"clt_var_counts_oracle", "central-difference Gamma''(0) of the counts CGF"}};
        std::string text = j.dump(2) + "\n";
        emit_file(cfg, "limit_constants.json", text);
        out << text;
        return 0;
    }
    std::ostringstream csv;
    csv_row(csv, "dt", "mean", "second_moment", "variance");
    for (double dt : or_default(cfg.dt_grid, {0.0, 0.5, 1.0, 2.0, 5.0, 10.0})) {
        if (dt < 0.0) throw Error(Errc::ConfigError, "dt", "--dt entries must be nonnegative");
        analytics::MomentQuery q{cfg.sim.r0, dt};
        double m1 = analytics::conditional_mean(p, q);
        double m2 = analytics::conditional_second_moment(p, q);
        csv_row(csv, dt, m1, m2, m2 - m1 * m1);
    }
    double m1 = p.stationary_mean(), m2 = analytics::stationary_second_moment(p);
    csv_row(csv, "inf", m1, m2, m2 - m1 * m1);
    emit_file(cfg, "moments.csv", csv.str());
    out << csv.str();
    return 0;
}

int cmd_laplace(const RunConfig& cfg, bool stationary, bool ode_csv, std::ostream& out) {
    const auto& p = cfg.params;
    auto thetas = or_default(cfg.theta_grid, {0.5, 1.0, 2.0});
    auto ts = or_default(cfg.t_grid, {0.5, 1.0, 5.0});
    for (double th : thetas) {
        if (th < 0.0) throw Error(Errc::ConfigError, "theta", "--theta entries must be nonnegative");
    }
    if (ode_csv) {
        double t_end = *std::max_element(ts.begin(), ts.end());
        auto sol = ode::solve(p, ode::OdeSystemKind::laplace_r(thetas.front()), t_end, ode::SolveOptions::with_tol(cfg.tol));
        std::ostringstream csv;
        write_ode_csv(csv, sol);
        emit_file(cfg, "laplace_ode.csv", csv.str());
        out << csv.str();
        return 0;
    }
    nlohmann::json records = nlohmann::json::array();
    for (double th : thetas) {
        for (double t : ts) {
            if (t < 0.0) throw Error(Errc::ConfigError, "t", "--t entries must be nonnegative");
            records.push_back({{"theta", th}, {"t", t}, {"r0", cfg.sim.r0},
                               {"value", ode::laplace_rt(p, th, t, cfg.sim.r0, cfg.tol)}});
        }
        if (stationary) {
            records.push_back({{"theta", th}, {"t", nullptr}, {"stationary", true},
                               {"value", ode::laplace_stationary(p, th, std::min(cfg.tol, 1e-12))}});
        }
    }
    std::string text = records.dump(2) + "\n";
    emit_file(cfg, "laplace.json", text);
    out << text;
    return 0;
}

int cmd_cgf(const RunConfig& cfg, bool ode_csv, double t_end, std::ostream& out) {
    ldp::CgfCurve curve(cfg.params, cfg.functional);
    double hi = std::isfinite(curve.theta_c()) ? curve.theta_c() : 1.0;
    auto thetas = or_default(cfg.theta_grid, linspace(-2.0, hi, 41));
    if (ode_csv) {
        auto kind = cfg.functional == ldp::Functional::IntegralR ? ode::OdeSystemKind::cgf_integral(thetas.front())
                                                                  : ode::OdeSystemKind::cgf_counts(thetas.front());
        if (t_end <= 0.0) t_end = 60.0 / cfg.params.net_reversion();
        auto sol = ode::solve(cfg.params, kind, t_end, ode::SolveOptions::with_tol(cfg.tol));
        std::ostringstream csv;
        write_ode_csv(csv, sol);
        emit_file(cfg, "cgf_ode.csv", csv.str());
        out << csv.str();
        return 0;
    }
    std::ostringstream csv;
    csv_row(csv, "theta", "y", "gamma");
    for (double th : thetas) {
        auto y = curve.y(th);
        double inf = std::numeric_limits<double>::infinity();
        csv_row(csv, th, y ? *y : inf, curve.gamma(th));
    }
    emit_file(cfg, "cgf.csv", csv.str());
    out << csv.str();
    return 0;
}

int cmd_rate(const RunConfig& cfg, std::ostream& out) {
    ldp::CgfCurve curve(cfg.params, cfg.functional);
    double mean = curve.point(0.0).dgamma;
    auto xs = or_default(cfg.x_grid, linspace(0.2 * mean, 3.0 * mean, 29));
    std::ostringstream csv;
    csv_row(csv, "x", "I", "theta_star");
    for (double x : xs) {
        auto r = curve.rate(x);
        csv_row(csv, x, r.I, r.theta_star);
    }
    emit_file(cfg, "rate.csv", csv.str());
    out << csv.str();
    return 0;
}

int cmd_bond(const RunConfig& cfg, bool ode_csv, std::ostream& out) {
    auto taus = or_default(cfg.tau_grid, {0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0});
    for (double tau : taus) {
        if (tau < 0.0) throw Error(Errc::ConfigError, "tau", "--tau entries must be nonnegative");
    }
    if (ode_csv) {
        auto sol = ode::solve(cfg.params, ode::OdeSystemKind::bond(), *std::max_element(taus.begin(), taus.end()),
                              ode::SolveOptions::with_tol(cfg.tol));
        std::ostringstream csv;
        write_ode_csv(csv, sol);
        emit_file(cfg, "bond_ode.csv", csv.str());
        out << csv.str();
        return 0;
    }
    nlohmann::json records = nlohmann::json::array();
    for (double tau : taus) {
        double price = ode::bond_price(cfg.params, tau, cfg.sim.r0, cfg.tol);
        records.push_back({{"tau", tau}, {"r0", cfg.sim.r0}, {"value", price},
                           {"yield", tau > 0.0 ? nlohmann::json(-std::log(price) / tau) : nlohmann::json(nullptr)}});
    }
    auto lr = ldp::long_run_yield(cfg.params);
    nlohmann::json j = {{"records", records}, {"long_run", {{"x_star", lr.x_star}, {"exponent", lr.exponent},
                                                            {"yield", -lr.exponent}}}};
    std::string text = j.dump(2) + "\n";
    emit_file(cfg, "bond.json", text);
    out << text;
    return 0;
}

int cmd_validate(const RunConfig& cfg, bool timing, std::ostream& out, std::ostream& err) {
    auto start = std::chrono::steady_clock::now();
    auto rep = run_validation(cfg.params, cfg.sim.seed, cfg.budget);
    std::string text = to_json(rep, timing).dump(2) + "\n";
    emit_file(cfg, "validation_report.json", text);
    out << text;
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << "validation " << (rep.pass ? "passed" : "FAILED") << " in " << format_double(secs) << " s\n";
    return rep.pass ? 0 : 1;
}

void error_json(std::ostream& err, std::string_view code, const std::string& field, const std::string& message) {
    nlohmann::json j = {{"error", code}, {"field", field}, {"message", message}};
    err << j.dump() << "\n";
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Square-root short rate with self-exciting jumps: moments, transforms, large deviations"};
    app.name("hawkes-cir");
    app.require_subcommand(1);

    Overrides o;
    std::size_t dump_paths = 10;
    bool limits_only = false, stationary = false, ode_csv = false, timing = false;
    double cgf_t_end = 0.0;
    std::function<int()> action;

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo paths and summary");
    add_common(simulate, o);
    simulate->add_option("--t-end", o.t_end, "horizon");
    simulate->add_option("--dt-max", o.dt_max, "maximum time step");
    simulate->add_option("--seed", o.seed, "master seed");
    simulate->add_option("--paths", o.n_paths, "number of paths");
    simulate->add_option("--jump-mode", o.jump_mode, "thinning | grid");
    simulate->add_option("--dump-paths", dump_paths, "paths written to paths.csv");

    auto* moments = app.add_subcommand("moments", "conditional and stationary moments");
    add_common(moments, o);
    moments->add_option("--dt", o.dt, "horizons");
    moments->add_flag("--limits", limits_only, "print the LLN/CLT constants instead");

    auto* laplace = app.add_subcommand("laplace", "Laplace transform of r_t");
    add_common(laplace, o);
    laplace->add_option("--theta", o.theta, "transform arguments (>= 0)");
    laplace->add_option("--t", o.t, "horizons");
    laplace->add_option("--tol", o.tol, "ODE tolerance");
    laplace->add_flag("--stationary", stationary, "also evaluate the stationary transform");
    laplace->add_flag("--ode-csv", ode_csv, "print (t, A, B) for the first theta");

    auto* cgf = app.add_subcommand("cgf", "limiting cumulant generating function table");
    add_common(cgf, o);
    cgf->add_option("--functional", o.functional, "integral | counts");
    cgf->add_option("--theta", o.theta, "theta grid");
    cgf->add_option("--tol", o.tol, "ODE tolerance");
    cgf->add_flag("--ode-csv", ode_csv, "print (t, A, B) for the first theta");
    cgf->add_option("--t-end", cgf_t_end, "ODE horizon for --ode-csv");

    auto* rate = app.add_subcommand("rate", "large-deviation rate function table");
    add_common(rate, o);
    rate->add_option("--functional", o.functional, "integral | counts");
    rate->add_option("--x", o.x, "query points");

    auto* bond = app.add_subcommand("bond", "zero-coupon bond prices");
    add_common(bond, o);
    bond->add_option("--tau", o.tau, "times to maturity");
    bond->add_option("--tol", o.tol, "ODE tolerance");
    bond->add_flag("--ode-csv", ode_csv, "print (tau, A, B) up to the largest tau");

    auto* validate_cmd = app.add_subcommand("validate", "run the validation suite");
    add_common(validate_cmd, o);
    validate_cmd->add_option("--seed", o.seed, "master seed");
    validate_cmd->add_flag("--include-timing", timing, "add wall-clock seconds to the report");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        error_json(err, "ConfigError", "", e.what());
        return 2;
    }

    try {
        RunConfig cfg = resolve(o);
        if (simulate->parsed()) return cmd_simulate(cfg, dump_paths, out);
        if (moments->parsed()) return cmd_moments(cfg, limits_only, out);
        if (laplace->parsed()) return cmd_laplace(cfg, stationary, ode_csv, out);
        if (cgf->parsed()) return cmd_cgf(cfg, ode_csv, cgf_t_end, out);
        if (rate->parsed()) return cmd_rate(cfg, out);
        if (bond->parsed()) return cmd_bond(cfg, ode_csv, out);
        if (validate_cmd->parsed()) return cmd_validate(cfg, timing, out, err);
    } catch (const Error& e) {
        error_json(err, to_string(e.code()), e.field(), e.what());
        return 2;
    } catch (const nlohmann::json::exception& e) {
        error_json(err, "ConfigError", "", e.what());
        return 2;
    }
    return 2;
}

}  // namespace hawkes_cir::harness
