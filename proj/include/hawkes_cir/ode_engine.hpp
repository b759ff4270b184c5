#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "hawkes_cir/model_params.hpp"

namespace hawkes_cir::ode {

/// The four exponential-affine systems for (A, B), all solved forward in time
/// with B(0) = 0:
///   LaplaceR:    A' = -bA + s^2 A^2/2 + beta(e^{aA} - 1),              A(0) = -theta
///   CgfIntegral: A' = -bA + s^2 A^2/2 + beta(e^{aA} - 1) + theta,      A(0) = 0
///   CgfCounts:   A' = -bA + s^2 A^2/2 + beta(e^{aA + theta} - 1),      A(0) = 0
///   Bond:        A' = -bA + s^2 A^2/2 + beta(e^{aA} - 1) - 1,          A(0) = 0 (time to maturity)
/// with B' = bcA + alpha(e^{aA} - 1), or e^{aA + theta} for CgfCounts.
struct OdeSystemKind {
    enum class Kind { LaplaceR, CgfIntegral, CgfCounts, Bond };
    Kind kind;
    double theta = 0.0;

    static OdeSystemKind laplace_r(double theta) { return {Kind::LaplaceR, theta}; }
    static OdeSystemKind cgf_integral(double theta) { return {Kind::CgfIntegral, theta}; }
    static OdeSystemKind cgf_counts(double theta) { return {Kind::CgfCounts, theta}; }
    static OdeSystemKind bond() { return {Kind::Bond, 0.0}; }

    double initial_a() const noexcept { return kind == Kind::LaplaceR ? -theta : 0.0; }
};

std::string_view to_string(OdeSystemKind::Kind kind) noexcept;

struct OdeSolution {
    std::vector<double> times;
    std::vector<double> A;
    std::vector<double> B;
    /// A exceeded the divergence ceiling (or blew up in finite time).
    bool diverged = false;
    /// |A'(t_end)| fell below the solver tolerance.
    bool converged = false;
    std::optional<double> A_limit;

    double t_final() const { return times.back(); }
    double A_final() const { return A.back(); }
    double B_final() const { return B.back(); }
};

struct SolveOptions {
    /// Absolute and relative local error target, in (0, 1e-3].
    double tol = 1e-10;
    /// Divergence ceiling on A; unset means 50 / a (1e8 when a = 0).
    std::optional<double> ceiling;
    std::size_t max_steps = 10'000'000;

    static SolveOptions with_tol(double tol) {
        SolveOptions o;
        o.tol = tol;
        return o;
    }
};

/// Right-hand side (A', B') at state (A, B).
struct Derivative {
    double dA;
    double dB;
};
Derivative rhs(const ModelParams& params, OdeSystemKind kind, double A) noexcept;

/// Adaptive Dormand-Prince 5(4) integration on [0, t_end]. Divergence is
/// reported in the result, not thrown. Throws Error(ToleranceNotMet) when the
/// step size collapses without divergence or max_steps is exhausted.
OdeSolution solve(const ModelParams& params, OdeSystemKind kind, double t_end, SolveOptions opts = {});

/// E[exp(-theta r_t) | r_0 = r0] = exp(A(t) r0 + B(t)).
double laplace_rt(const ModelParams& params, double theta, double t, double r0, double tol = 1e-11);

/// E[exp(-theta r_inf)]. Integrates until the linearized tail
/// (bcA + alpha(e^{aA} - 1)) / (b - a beta) is below 1e-10 and adds it.
/// Throws Error(ConvergenceTimeout) if that does not happen by t_max.
double laplace_stationary(const ModelParams& params, double theta, double tol = 1e-12, double t_max = 0.0);

/// P(t, T, r0) for time to maturity tau = T - t.
double bond_price(const ModelParams& params, double tau, double r0, double tol = 1e-11);

}  // namespace hawkes_cir::ode
