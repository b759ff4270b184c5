#include "hawkes_cir/ode_engine.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "hawkes_cir/error.hpp"

namespace hawkes_cir::ode {

namespace {

using State = std::array<double, 2>;
namespace odeint = boost::numeric::odeint;

/// Stops the integration early when it returns true for (t, A, B).
using StopRule = std::function<bool(double, double, double)>;

OdeSolution integrate(const ModelParams& p, OdeSystemKind kind, double t_end, const SolveOptions& opts,
                      const StopRule& stop = {}) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw Error(Errc::ToleranceNotMet, "t_end", "t_end must be positive and finite");
    }
    if (!(opts.tol > 0.0 && opts.tol <= 1e-3)) {
        throw Error(Errc::ToleranceNotMet, "tol", "tol must lie in (0, 1e-3]");
    }
    const double ceiling = opts.ceiling ? *opts.ceiling : (p.a > 0.0 ? 50.0 / p.a : 1e8);

    auto system = [&](const State& x, State& dxdt, double) {
        Derivative d = rhs(p, kind, x[0]);
        dxdt[0] = d.dA;
        dxdt[1] = d.dB;
    };
    auto stepper = odeint::make_controlled(opts.tol, opts.tol, odeint::runge_kutta_dopri5<State>());

    OdeSolution sol;
    State x{kind.initial_a(), 0.0};
    double t = 0.0;
    double dt = std::min(1e-3, t_end);
    sol.times.push_back(t);
    sol.A.push_back(x[0]);
    sol.B.push_back(x[1]);

    std::size_t steps = 0;
    while (t < t_end) {
        if (++steps > opts.max_steps) {
            throw Error(Errc::ToleranceNotMet, "max_steps", "step budget exhausted at t=" + std::to_string(t));
        }
        const double min_dt = 1e-14 * std::max(1.0, t);
        if (dt < min_dt) {
            if (x[0] > 0.5 * ceiling || !std::isfinite(x[0])) {
                sol.diverged = true;
                break;
            }
            throw Error(Errc::ToleranceNotMet, "tol", "step size underflow at t=" + std::to_string(t));
        }
        bool last = false;
        if (t + dt >= t_end) {
            dt = t_end - t;
            last = true;
        }
        const State saved = x;
        const double t_saved = t;
        double trial_dt = dt;
        auto res = stepper.try_step(system, x, t, trial_dt);
        if (res == odeint::fail) {
            dt = trial_dt;
            continue;
        }
        if (!std::isfinite(x[0]) || !std::isfinite(x[1])) {
            x = saved;
            t = t_saved;
            dt *= 0.25;
            continue;
        }
        if (last) t = t_end;
        dt = trial_dt;
        sol.times.push_back(t);
        sol.A.push_back(x[0]);
        sol.B.push_back(x[1]);
        if (x[0] > ceiling) {
            sol.diverged = true;
            break;
        }
        if (stop && stop(t, x[0], x[1])) break;
    }

    if (!sol.diverged) {
        double slope = rhs(p, kind, x[0]).dA;
        sol.converged = std::abs(slope) <= opts.tol * std::max(1.0, std::abs(x[0]));
        if (sol.converged) sol.A_limit = x[0];
    }
    return sol;
}

}  // namespace

std::string_view to_string(OdeSystemKind::Kind kind) noexcept {
    switch (kind) {
        case OdeSystemKind::Kind::LaplaceR: return "laplace_r";
        case OdeSystemKind::Kind::CgfIntegral: return "cgf_integral";
        case OdeSystemKind::Kind::CgfCounts: return "cgf_counts";
        case OdeSystemKind::Kind::Bond: return "bond";
    }
    return "unknown";
}

Derivative rhs(const ModelParams& p, OdeSystemKind kind, double A) noexcept {
    using K = OdeSystemKind::Kind;
    const double shift = kind.kind == K::CgfCounts ? kind.theta : 0.0;
    const double jump = std::expm1(p.a * A + shift);
    double dA = -p.b * A + 0.5 * p.sigma * p.sigma * A * A + p.beta * jump;
    if (kind.kind == K::CgfIntegral) dA += kind.theta;
    if (kind.kind == K::Bond) dA -= 1.0;
    return {dA, p.b * p.c * A + p.alpha * jump};
}

OdeSolution solve(const ModelParams& params, OdeSystemKind kind, double t_end, SolveOptions opts) {
    return integrate(params, kind, t_end, opts);
}

double laplace_rt(const ModelParams& params, double theta, double t, double r0, double tol) {
    if (t == 0.0 || theta == 0.0) return std::exp(-theta * r0);
    auto sol = integrate(params, OdeSystemKind::laplace_r(theta), t, SolveOptions::with_tol(tol));
    return std::exp(sol.A_final() * r0 + sol.B_final());
}

double laplace_stationary(const ModelParams& p, double theta, double tol, double t_max) {
    if (theta == 0.0) return 1.0;
    const double k = p.net_reversion();
    if (t_max <= 0.0) t_max = 2000.0 / k;
    auto tail = [&](double A) { return (p.b * p.c * A + p.alpha * std::expm1(p.a * A)) / k; };
    bool reached = false;
    auto sol = integrate(p, OdeSystemKind::laplace_r(theta), t_max, SolveOptions::with_tol(tol),
                         [&](double, double A, double) { return reached = std::abs(tail(A)) < 1e-10; });
    if (!reached) {
        throw Error(Errc::ConvergenceTimeout, "theta",
                    "stationary Laplace tail did not decay by t=" + std::to_string(t_max));
    }
    return std::exp(sol.B_final() + tail(sol.A_final()));
}

double bond_price(const ModelParams& params, double tau, double r0, double tol) {
    if (tau == 0.0) return 1.0;
    auto sol = integrate(params, OdeSystemKind::bond(), tau, SolveOptions::with_tol(tol));
    return std::exp(sol.A_final() * r0 + sol.B_final());
}

}  // namespace hawkes_cir::ode
