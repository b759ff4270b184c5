#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hawkes_cir/model_params.hpp"

namespace hawkes_cir::sim {

enum class JumpMode {
    /// Ogata-style thinning of the intensity along the drift flow on each
    /// step; the step is split at every accepted event.
    Thinning,
    /// At most one jump per step with probability (alpha + beta r) dt.
    GridBernoulli,
};

std::string_view to_string(JumpMode mode) noexcept;

struct SimConfig {
    double t_end = 1.0;
    /// Maximum step; unset selects default_dt_max(params) clamped to t_end.
    std::optional<double> dt_max;
    double r0 = 0.0;
    std::uint64_t seed = 0;
    std::size_t n_paths = 1;
    JumpMode jump_mode = JumpMode::Thinning;
    /// Keep every grid point. When false only the endpoints are stored.
    bool record_path = true;
};

/// min(1e-2, 1e-2 / b).
double default_dt_max(const ModelParams& params) noexcept;

/// One trajectory. rates are the (nonnegative) state at each entry of times;
/// at an event epoch the stored rate is the post-jump value.
struct PathSample {
    std::vector<double> times;
    std::vector<double> rates;
    std::vector<double> jump_times;
    std::size_t n_terminal = 0;
    double integral_r = 0.0;  ///< trapezoid rule on the split grid

    double r_terminal() const { return rates.back(); }
};

/// Seed of the independent stream used by path `path_index`.
std::uint64_t path_stream_seed(std::uint64_t seed, std::uint64_t path_index) noexcept;

/// Full-truncation scheme: the drift b(c - r) flow is integrated exactly over
/// each step, the diffusion increment is sigma sqrt(max(x,0) h) Z, stored
/// rates are max(x, 0) and each jump adds exactly a.
/// Deterministic given (cfg.seed, path_index). Throws Error with
/// StepSizeInvalid for a bad config and NonFiniteState on blow-up.
PathSample simulate_path(const ModelParams& params, const SimConfig& cfg, std::uint64_t path_index);

/// Sample mean and standard error of one path functional.
struct McEstimate {
    std::string name;
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t n = 0;
    std::optional<double> target;
    std::optional<bool> pass;

    /// Sets target and pass = |mean - target| <= n_se * standard_error.
    McEstimate& compare(double target_value, double n_se = 3.0);
};

/// Running mean/variance (Welford).
class RunningStats {
public:
    void push(double x) noexcept;
    std::size_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    /// Unbiased sample variance.
    double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double standard_error() const noexcept;
    McEstimate estimate(std::string name) const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct McReport {
    std::uint64_t seed = 0;
    std::size_t n_paths = 0;
    double t_end = 0.0;
    std::vector<McEstimate> estimates;

    /// Throws std::out_of_range for an unknown name.
    const McEstimate& at(std::string_view name) const;
    McEstimate& at(std::string_view name);
};

/// Summarizes integral_r, n_terminal, r_terminal, r_terminal^2,
/// exp(-integral_r), the time averages and the compensator gap
/// N_T - alpha T - beta * integral_r.
McReport summarize(const ModelParams& params, const SimConfig& cfg, std::span<const PathSample> paths);

struct BatchResult {
    std::vector<PathSample> paths;
    McReport report;
};

/// Thread count from HAWKES_CIR_THREADS, else hardware concurrency.
unsigned default_thread_count() noexcept;

/// n_paths independent paths; path i always uses stream (seed, i), so the
/// result is identical for any thread count.
BatchResult simulate_batch(const ModelParams& params, const SimConfig& cfg, unsigned threads = 0);

nlohmann::json to_json(const McEstimate& est);
nlohmann::json to_json(const McReport& report);

/// Long format: path_id,time,rate,cum_jumps.
void write_paths_csv(std::ostream& out, std::span<const PathSample> paths, std::size_t first_path_id = 0);

}  // namespace hawkes_cir::sim
