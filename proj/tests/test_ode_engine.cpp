#include <doctest.h>

#include <cmath>

#include "hawkes_cir/error.hpp"
#include "hawkes_cir/ldp.hpp"
#include "hawkes_cir/ode_engine.hpp"

using namespace hawkes_cir;
using namespace hawkes_cir::ode;

namespace {

constexpr ModelParams P0 = reference_params();

// Closed-form Laplace transform of the square-root diffusion.
double cir_closed_form(double b, double c, double s, double theta, double t, double r0) {
    double e = std::exp(-b * t);
    double denom = 1.0 + s * s * theta * (1.0 - e) / (2.0 * b);
    return std::pow(denom, -2.0 * b * c / (s * s)) * std::exp(-theta * e * r0 / denom);
}

}  // namespace

TEST_CASE("zero theta gives the trivial solution") {
    for (auto kind : {OdeSystemKind::laplace_r(0.0), OdeSystemKind::cgf_integral(0.0), OdeSystemKind::cgf_counts(0.0)}) {
        auto sol = solve(P0, kind, 5.0);
        CHECK(sol.A_final() == 0.0);
        CHECK(sol.B_final() == 0.0);
        CHECK_FALSE(sol.diverged);
    }
    CHECK(laplace_rt(P0, 0.0, 3.0, 2.0) == 1.0);
}

TEST_CASE("zero horizon is the initial condition") {
    CHECK(laplace_rt(P0, 2.0, 0.0, 1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(bond_price(P0, 0.0, 3.0) == 1.0);
}

TEST_CASE("right-hand side matches the Riccati system") {
    double A = 0.3;
    auto d = rhs(P0, OdeSystemKind::cgf_counts(0.2), A);
    CHECK(d.dA == doctest::Approx(-2.0 * A + 0.5 * A * A + (std::exp(0.5 * A + 0.2) - 1.0)).epsilon(1e-15));
    CHECK(d.dB == doctest::Approx(2.0 * A + (std::exp(0.5 * A + 0.2) - 1.0)).epsilon(1e-15));
    auto bond = rhs(P0, OdeSystemKind::bond(), A);
    CHECK(bond.dA == doctest::Approx(-2.0 * A + 0.5 * A * A + std::expm1(0.5 * A) - 1.0).epsilon(1e-15));
}

TEST_CASE("a = 0 Laplace transform matches the closed form") {
    CHECK(cir_closed_form(2.0, 1.0, 1.0, 1.0, 1.0, 1.0) == doctest::Approx(0.408978).epsilon(1e-5));
    for (double b : {0.5, 2.0}) {
        ModelParams p{0.0, b, 1.0, 1.0, 1.0, 1.0};
        for (double theta : {0.1, 1.0, 3.0})
            for (double t : {0.2, 1.0, 5.0})
                for (double r0 : {0.0, 1.0, 2.0})
                    CHECK(std::abs(laplace_rt(p, theta, t, r0) - cir_closed_form(b, 1.0, 1.0, theta, t, r0)) < 1e-9);
    }
}

TEST_CASE("a = 0 stationary transform is the Gamma law") {
    ModelParams p{0.0, 2.0, 1.0, 1.0, 1.0, 1.0};
    CHECK(std::abs(laplace_stationary(p, 1.0) - 0.4096) < 1e-8);
    for (double theta : {0.3, 2.0}) {
        double gamma_law = std::pow(1.0 + theta * 0.25, -4.0);
        CHECK(std::abs(laplace_stationary(p, theta) - gamma_law) < 1e-8);
    }
    CHECK(laplace_stationary(p, 0.0) == 1.0);
}

TEST_CASE("stationary transform recovers the stationary mean and variance") {
    auto f = [](double th) { return -std::log(laplace_stationary(P0, th)); };
    const double h = 1e-3;
    double mean = (4.0 * f(h) - f(2.0 * h)) / (2.0 * h);
    CHECK(mean == doctest::Approx(5.0 / 3.0).epsilon(1e-5));
    // Variance 32/9 - 25/9 from the second-order expansion.
    double var = (f(2.0 * h) - 2.0 * f(h)) / (-h * h);
    CHECK(var == doctest::Approx(7.0 / 9.0).epsilon(1e-2));
}

TEST_CASE("finite-horizon Laplace transforms are monotone in theta and r0") {
    double prev = 1.0;
    for (double theta : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        double v = laplace_rt(P0, theta, 1.0, 1.0);
        CHECK(v > 0.0);
        CHECK(v < prev);
        prev = v;
        CHECK(laplace_rt(P0, theta, 1.0, 2.0) < v);
    }
}

TEST_CASE("Laplace ODE orbit is monotone for positive theta") {
    auto sol = solve(P0, OdeSystemKind::laplace_r(1.0), 10.0);
    for (std::size_t i = 1; i < sol.A.size(); ++i) {
        CHECK(sol.A[i] >= sol.A[i - 1]);
        CHECK(sol.A[i] < 0.0);
        CHECK(sol.B[i] <= sol.B[i - 1]);
    }
}

TEST_CASE("halving the tolerance moves the answer by less than ten tolerances") {
    for (double tol : {1e-6, 1e-8, 1e-10}) {
        double v1 = laplace_rt(P0, 1.0, 2.0, 1.0, tol);
        double v2 = laplace_rt(P0, 1.0, 2.0, 1.0, tol / 2.0);
        CHECK(std::abs(v1 - v2) < 10.0 * tol);
        double b1 = bond_price(P0, 5.0, 1.0, tol);
        double b2 = bond_price(P0, 5.0, 1.0, tol / 2.0);
        CHECK(std::abs(b1 - b2) < 10.0 * tol);
    }
}

TEST_CASE("CGF ODEs converge to the root curve inside the domain") {
    for (auto fn : {ldp::Functional::IntegralR, ldp::Functional::Counts}) {
        ldp::CgfCurve curve(P0, fn);
        for (double theta : {-1.0, 0.5 * curve.theta_c(), 0.9 * curve.theta_c()}) {
            auto kind = fn == ldp::Functional::IntegralR ? OdeSystemKind::cgf_integral(theta)
                                                         : OdeSystemKind::cgf_counts(theta);
            auto sol = solve(P0, kind, 200.0);
            CHECK_FALSE(sol.diverged);
            CHECK(std::abs(sol.A_final() - curve.y(theta).value()) < 1e-8);
        }
    }
}

TEST_CASE("CGF ODE diverges beyond the critical value") {
    auto sol = solve(P0, OdeSystemKind::cgf_integral(1.0), 200.0);
    CHECK(sol.diverged);
    auto counts = solve(P0, OdeSystemKind::cgf_counts(0.5), 200.0);
    CHECK(counts.diverged);
}

TEST_CASE("counts CGF from the ODE log-slope") {
    auto sol = solve(P0, OdeSystemKind::cgf_counts(0.1), 80.0);
    // log E[e^{theta N_t}] = B(t) for r0 = 0; its slope is Gamma(theta).
    std::size_t i1 = 0;
    while (sol.times[i1] < 40.0) ++i1;
    double slope = (sol.B_final() - sol.B[i1]) / (sol.t_final() - sol.times[i1]);
    CHECK(std::abs(slope - 0.297809719685037511417) < 1e-6);
}

TEST_CASE("bond prices") {
    double p1 = bond_price(P0, 1.0, 1.0);
    CHECK(p1 > 0.0);
    CHECK(p1 < 1.0);
    CHECK(bond_price(P0, 1.0, 2.0) < p1);
    CHECK(bond_price(P0, 2.0, 1.0) < p1);

    auto ly = ldp::long_run_yield(P0);
    auto sol = solve(P0, OdeSystemKind::bond(), 200.0);
    CHECK(std::abs(sol.A_final() - ly.x_star) < 1e-8);
    double rate = std::log(bond_price(P0, 200.0, 1.0)) / 200.0;
    CHECK(std::abs(rate - ly.exponent) < 1e-3);

    // Without jumps the yield curve is the classical square-root one.
    ModelParams cir{0.0, 2.0, 1.0, 1.0, 1.0, 1.0};
    double g = std::sqrt(4.0 + 2.0);
    double tau = 1.5;
    double eg = std::exp(g * tau);
    double den = (g + 2.0) * (eg - 1.0) + 2.0 * g;
    double Acf = std::pow(2.0 * g * std::exp((2.0 + g) * tau / 2.0) / den, 4.0);
    double Bcf = 2.0 * (eg - 1.0) / den;
    CHECK(bond_price(cir, tau, 0.7) == doctest::Approx(Acf * std::exp(-Bcf * 0.7)).epsilon(1e-9));
}

TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(solve(P0, OdeSystemKind::bond(), 1.0, SolveOptions::with_tol(0.1)), Error);
    CHECK_THROWS_AS(solve(P0, OdeSystemKind::bond(), 1.0, SolveOptions::with_tol(0.0)), Error);
    CHECK_THROWS_AS(solve(P0, OdeSystemKind::bond(), -1.0), Error);
    CHECK_THROWS_AS(laplace_rt(P0, 1.0, -1.0, 1.0), Error);
    CHECK(laplace_rt(P0, -0.1, 1.0, 1.0) > 1.0);
}
