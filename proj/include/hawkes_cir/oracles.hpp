#pragma once

#include <span>
#include <vector>

#include "hawkes_cir/model_params.hpp"

namespace hawkes_cir::oracles {

/// Closed-form E[exp(-theta r_t) | r_0] for the square-root diffusion
/// dr = b(c - r)dt + sigma sqrt(r) dW (jump coefficients ignored).
double cir_laplace(const ModelParams& params, double theta, double t, double r0);

/// Laplace transform of the Gamma(2bc/sigma^2, sigma^2/(2b)) stationary law:
/// (1 + theta sigma^2 / (2b))^{-2bc/sigma^2}.
double cir_stationary_laplace(const ModelParams& params, double theta);

/// sup over a tabulated concave objective: max_i theta_i x - gamma_i.
struct GridSup {
    double value;
    double theta;
};
GridSup grid_legendre(std::span<const double> theta, std::span<const double> gamma, double x);

/// Second moment E[r_s^2 | r_0] by integrating the closed linear moment ODEs
///   m1' = bc + a alpha - k m1,
///   m2' = (2bc + sigma^2 + 2a alpha + a^2 beta) m1 - 2k m2 + a^2 alpha
/// with classical RK4 on n_steps steps.
struct MomentPair {
    double mean;
    double second;
};
MomentPair moment_ode(const ModelParams& params, double r0, double dt, int n_steps = 20000);

}  // namespace hawkes_cir::oracles
