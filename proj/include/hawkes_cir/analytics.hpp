#pragma once

#include "hawkes_cir/model_params.hpp"

namespace hawkes_cir::analytics {

/// Conditioning state r0 and horizon dt = s - t.
struct MomentQuery {
    double r0;
    double dt;
};

/// E[r_s | r_t = r0]. dt = 0 returns r0.
double conditional_mean(const ModelParams& params, MomentQuery q);

/// E[r_s^2 | r_t = r0]. dt = 0 returns r0^2.
double conditional_second_moment(const ModelParams& params, MomentQuery q);

/// Long-horizon limit of conditional_second_moment.
double stationary_second_moment(const ModelParams& params);

/// Classical square-root diffusion moments (no jumps), used for reduction checks.
double cir_conditional_mean(const ModelParams& params, MomentQuery q);
double cir_conditional_second_moment(const ModelParams& params, MomentQuery q);

struct LimitConstants {
    double lln_integral;      ///< (bc + a alpha) / (b - a beta)
    double lln_counts;        ///< b (alpha + beta c) / (b - a beta)
    double clt_var_integral;  ///< [a^2 alpha k + (a^2 beta + sigma^2)(bc + a alpha)] / k^3, k = b - a beta
    /// Gamma''(0) of the limiting counts CGF by central differences. This is
    /// the value used for standardization.
    double clt_var_counts;
    /// [b^3 (alpha + beta c) + sigma^2 beta^2 (bc + a alpha)] / k^3.
    double clt_var_counts_closed_form;
    /// [b^3 a^2 (alpha + beta c) + 4 sigma^2 b^2 (bc + a alpha)] / (a^2 k^3),
    /// reported for comparison only. It exceeds the counts variance whenever
    /// sigma > 0 and is never used for standardization.
    double clt_var_counts_uncorrected;
};

LimitConstants limit_constants(const ModelParams& params);

/// Central second difference of the limiting CGF at theta = 0.
double numeric_cgf_curvature(const ModelParams& params, bool counts, double h = 1e-4);

}  // namespace hawkes_cir::analytics
