#include "hawkes_cir/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include <boost/random/normal_distribution.hpp>

#include "hawkes_cir/csv.hpp"
#include "hawkes_cir/error.hpp"

namespace hawkes_cir::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class PathRng {
public:
    explicit PathRng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    /// Uniform on [0, 1).
    double uniform() { return uniform_(engine_); }
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
    std::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_;
    std::uniform_real_distribution<double> uniform_;
};

double resolve_dt_max(const ModelParams& params, const SimConfig& cfg) {
    if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) {
        throw Error(Errc::StepSizeInvalid, "t_end", "t_end must be positive and finite");
    }
    double dt = cfg.dt_max ? *cfg.dt_max : std::min(default_dt_max(params), cfg.t_end);
    if (!(dt > 0.0) || dt > cfg.t_end || !std::isfinite(dt)) {
        throw Error(Errc::StepSizeInvalid, "dt_max", "dt_max must satisfy 0 < dt_max <= t_end");
    }
    if (!(cfg.r0 >= 0.0) || !std::isfinite(cfg.r0)) {
        throw Error(Errc::StepSizeInvalid, "r0", "r0 must be finite and nonnegative");
    }
    if (cfg.n_paths < 1) {
        throw Error(Errc::StepSizeInvalid, "n_paths", "n_paths must be at least 1");
    }
    return dt;
}

/// Full-truncation Euler state. The stored rate is max(x, 0).
struct PathState {
    double x;
    double t;

    double rate() const noexcept { return std::max(x, 0.0); }
};

}  // namespace

std::string_view to_string(JumpMode mode) noexcept {
    return mode == JumpMode::Thinning ? "thinning" : "grid";
}

double default_dt_max(const ModelParams& params) noexcept {
    return std::min(1e-2, 1e-2 / params.b);
}

std::uint64_t path_stream_seed(std::uint64_t seed, std::uint64_t path_index) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(path_index + 0x632be59bd9b4e019ULL));
}

PathSample simulate_path(const ModelParams& p, const SimConfig& cfg, std::uint64_t path_index) {
    const double dt_max = resolve_dt_max(p, cfg);
    PathRng rng(path_stream_seed(cfg.seed, path_index));

    PathSample out;
    PathState st{cfg.r0, 0.0};
    double budget = -1.0;  // remaining unit-rate exponential, < 0 when unset
    out.times.push_back(0.0);
    out.rates.push_back(st.rate());

    auto record = [&](double t, double r) {
        if (cfg.record_path) {
            out.times.push_back(t);
            out.rates.push_back(r);
        }
    };

    // Advances the diffusion part by h and accumulates the integral. The
    // linear drift is integrated exactly over the step.
    const double full_decay = std::expm1(-p.b * dt_max);
    auto decay_m1 = [&](double h) { return std::abs(h - dt_max) <= 1e-9 * dt_max ? full_decay : std::expm1(-p.b * h); };
    auto euler = [&](double h) {
        double r = st.rate();
        double next = st.x - (p.c - r) * decay_m1(h) + p.sigma * std::sqrt(r * h) * rng.normal();
        if (!std::isfinite(next)) {
            throw Error(Errc::NonFiniteState, "rate",
                        "non-finite state at t=" + std::to_string(st.t) + " on path " + std::to_string(path_index));
        }
        st.x = next;
        st.t += h;
        out.integral_r += 0.5 * (r + st.rate()) * h;
    };

    auto jump = [&]() {
        st.x = st.rate() + p.a;
        out.jump_times.push_back(st.t);
    };

    const auto n_steps = static_cast<std::size_t>(std::ceil(cfg.t_end / dt_max - 1e-9));
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double step_end = (i + 1 == n_steps) ? cfg.t_end : static_cast<double>(i + 1) * dt_max;

        if (cfg.jump_mode == JumpMode::GridBernoulli) {
            double intensity = p.alpha + p.beta * st.rate();
            double h = step_end - st.t;
            bool fire = intensity > 0.0 && rng.uniform() < intensity * h;
            euler(h);
            st.t = step_end;
            if (fire) jump();
            record(st.t, st.rate());
            continue;
        }

        // Thinning against the drift flow c + (r - c) e^{-b s}, which is
        // monotone, so its larger endpoint bounds the intensity. The unit
        // exponential budget carries over between steps.
        while (true) {
            const double h = step_end - st.t;
            const double r = st.rate();
            const double r_flow_end = r + (r - p.c) * decay_m1(h);
            const double bound = p.alpha + p.beta * std::max(r, r_flow_end);

            double event = step_end;
            double s = 0.0;
            while (bound > 0.0) {
                if (budget < 0.0) budget = rng.exponential(1.0);
                if (budget >= bound * (h - s)) {
                    budget -= bound * (h - s);
                    break;
                }
                s += budget / bound;
                budget = -1.0;
                double lam = p.alpha + p.beta * (p.c + (r - p.c) * std::exp(-p.b * s));
                if (rng.uniform() * bound <= lam) {
                    event = st.t + s;
                    break;
                }
            }
            if (event >= step_end) {
                euler(h);
                st.t = step_end;
                record(st.t, st.rate());
                break;
            }
            euler(event - st.t);
            st.t = event;
            jump();
            record(st.t, st.rate());
        }
    }

    if (!cfg.record_path) {
        out.times.push_back(st.t);
        out.rates.push_back(st.rate());
    }
    out.n_terminal = out.jump_times.size();
    return out;
}

McEstimate& McEstimate::compare(double target_value, double n_se) {
    target = target_value;
    pass = std::abs(mean - target_value) <= n_se * standard_error;
    return *this;
}

void RunningStats::push(double x) noexcept {
    ++n_;
    double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
}

double RunningStats::standard_error() const noexcept {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

McEstimate RunningStats::estimate(std::string name) const {
    McEstimate e;
    e.name = std::move(name);
    e.mean = mean();
    e.standard_error = standard_error();
    e.n = n_;
    return e;
}

const McEstimate& McReport::at(std::string_view name) const {
    for (const auto& e : estimates) {
        if (e.name == name) return e;
    }
    throw std::out_of_range("no Monte Carlo estimate named " + std::string(name));
}

McEstimate& McReport::at(std::string_view name) {
    return const_cast<McEstimate&>(static_cast<const McReport&>(*this).at(name));
}

McReport summarize(const ModelParams& p, const SimConfig& cfg, std::span<const PathSample> paths) {
    RunningStats integral, counts, terminal, terminal_sq, discount, time_avg, event_rate, gap;
    for (const auto& path : paths) {
        double n = static_cast<double>(path.n_terminal);
        double rT = path.r_terminal();
        integral.push(path.integral_r);
        counts.push(n);
        terminal.push(rT);
        terminal_sq.push(rT * rT);
        discount.push(std::exp(-path.integral_r));
        time_avg.push(path.integral_r / cfg.t_end);
        event_rate.push(n / cfg.t_end);
        gap.push(n - p.alpha * cfg.t_end - p.beta * path.integral_r);
    }
    McReport report;
    report.seed = cfg.seed;
    report.n_paths = paths.size();
    report.t_end = cfg.t_end;
    report.estimates = {
        integral.estimate("integral_r"),       counts.estimate("n_terminal"),
        terminal.estimate("r_terminal"),       terminal_sq.estimate("r_terminal_sq"),
        discount.estimate("discount"),         time_avg.estimate("time_avg_rate"),
        event_rate.estimate("event_rate"),     gap.estimate("compensator_gap"),
    };
    return report;
}

unsigned default_thread_count() noexcept {
    if (const char* env = std::getenv("HAWKES_CIR_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

BatchResult simulate_batch(const ModelParams& p, const SimConfig& cfg, unsigned threads) {
    resolve_dt_max(p, cfg);
    if (threads == 0) threads = default_thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.n_paths));

    BatchResult result;
    result.paths.resize(cfg.n_paths);
    std::vector<std::exception_ptr> errors(threads);

    auto worker = [&](unsigned w) {
        // Contiguous blocks; each slot is written by exactly one worker.
        std::size_t begin = cfg.n_paths * w / threads;
        std::size_t end = cfg.n_paths * (w + 1) / threads;
        try {
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    result.paths[i] = simulate_path(p, cfg, i);
                } catch (const Error& e) {
                    throw Error(e.code(), "path " + std::to_string(i), "path " + std::to_string(i) + ": " + e.what());
                }
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };

    if (threads <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    result.report = summarize(p, cfg, result.paths);
    return result;
}

nlohmann::json to_json(const McEstimate& est) {
    nlohmann::json j = {{"name", est.name}, {"estimate", est.mean}, {"standard_error", est.standard_error}, {"n", est.n}};
    if (est.target) j["target"] = *est.target;
    if (est.pass) j["pass"] = *est.pass;
    return j;
}

nlohmann::json to_json(const McReport& report) {
    nlohmann::json est = nlohmann::json::array();
    for (const auto& e : report.estimates) est.push_back(to_json(e));
    return {{"seed", report.seed}, {"n_paths", report.n_paths}, {"t_end", report.t_end}, {"estimates", est}};
}

void write_paths_csv(std::ostream& out, std::span<const PathSample> paths, std::size_t first_path_id) {
    csv_row(out, "path_id", "time", "rate", "cum_jumps");
    for (std::size_t k = 0; k < paths.size(); ++k) {
        const auto& path = paths[k];
        std::size_t jumps = 0;
        for (std::size_t i = 0; i < path.times.size(); ++i) {
            while (jumps < path.jump_times.size() && path.jump_times[jumps] <= path.times[i]) ++jumps;
            csv_row(out, first_path_id + k, path.times[i], path.rates[i], jumps);
        }
    }
}

}  // namespace hawkes_cir::sim
