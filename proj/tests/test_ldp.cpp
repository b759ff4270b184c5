#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "hawkes_cir/analytics.hpp"
#include "hawkes_cir/ldp.hpp"

using namespace hawkes_cir;
using namespace hawkes_cir::ldp;

namespace {

constexpr ModelParams P0 = reference_params();
constexpr double inf = std::numeric_limits<double>::infinity();

// Maximizes theta x - Gamma(theta) over [lo, hi] by a grid scan followed by
// golden-section refinement around the best grid point.
double brute_force_rate(const CgfCurve& curve, double x, double lo, double hi, int n = 20000) {
    auto f = [&](double t) { return t * x - curve.gamma(t); };
    double best_t = lo, best = f(lo);
    double h = (hi - lo) / n;
    for (int i = 1; i <= n; ++i) {
        double t = lo + i * h;
        double v = f(t);
        if (v > best) best = v, best_t = t;
    }
    double a = std::max(lo, best_t - h), b = std::min(hi, best_t + h);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int i = 0; i < 200; ++i) {
        double c = b - g * (b - a), d = a + g * (b - a);
        if (f(c) > f(d)) b = d; else a = c;
    }
    return std::max(best, f(0.5 * (a + b)));
}

}  // namespace

TEST_CASE("integral functional critical point at the reference parameters") {
    auto cr = critical_integral(P0);
    // 30-digit solution of sigma^2 y + a beta e^{a y} = b.
    CHECK(cr.y_c == doctest::Approx(1.1232431673800343157).epsilon(1e-12));
    CHECK(cr.theta_c == doctest::Approx(0.86213506298717137).epsilon(1e-12));
    CHECK(std::abs(P0.sigma * P0.sigma * cr.y_c + P0.a * P0.beta * std::exp(P0.a * cr.y_c) - P0.b) < 1e-12);

    CgfCurve curve(P0, Functional::IntegralR);
    CHECK(std::abs(curve.root_equation(cr.y_c, cr.theta_c)) < 1e-12);
    CHECK(std::abs(curve.root_equation_dy(cr.y_c, cr.theta_c)) < 1e-12);
}

TEST_CASE("integral critical point without diffusion") {
    ModelParams p = P0;
    p.sigma = 0.0;
    auto cr = critical_integral(p);
    CHECK(cr.y_c == doctest::Approx(std::log(p.b / (p.a * p.beta)) / p.a).epsilon(1e-12));
    CHECK(cr.y_c == doctest::Approx(2.0 * std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("counts functional critical point") {
    auto cr = critical_counts(P0);
    CHECK(cr.y_c == doctest::Approx(0.83772233983162066800).epsilon(1e-12));
    CHECK(cr.theta_c == doctest::Approx(0.42466759076075828574).epsilon(1e-12));

    CHECK(critical_counts_subtractive_theta(P0) == doctest::Approx(cr.theta_c).epsilon(1e-12));
    auto by_max = critical_counts_by_maximization(P0);
    CHECK(by_max.theta_c == doctest::Approx(cr.theta_c).epsilon(1e-10));
    CHECK(by_max.y_c == doctest::Approx(cr.y_c).epsilon(1e-8));

    // e^{a y_c + theta_c} = (b - sigma^2 y_c) / (a beta)
    double lhs = std::exp(P0.a * cr.y_c + cr.theta_c);
    double rhs = (P0.b - P0.sigma * P0.sigma * cr.y_c) / (P0.a * P0.beta);
    CHECK(std::abs(lhs - rhs) < 1e-10);

    CgfCurve curve(P0, Functional::Counts);
    CHECK(std::abs(curve.root_equation(cr.y_c, cr.theta_c)) < 1e-12);
    CHECK(std::abs(curve.root_equation_dy(cr.y_c, cr.theta_c)) < 1e-12);
}

TEST_CASE("subtractive and stable counts critical points agree across parameters") {
    const ModelParams params[] = {{0.5, 2.0, 1.0, 1.0, 1.0, 1.0}, {1.0, 3.0, 0.5, 0.2, 2.0, 0.3},
                                  {0.1, 0.5, 2.0, 1.0, 3.0, 1.4}, {2.0, 5.0, 1.0, 1.0, 0.5, 3.0}};
    for (const auto& p : params) {
        auto cr = critical_counts(p);
        CHECK(critical_counts_subtractive_theta(p) == doctest::Approx(cr.theta_c).epsilon(1e-9));
        CHECK(critical_counts_by_maximization(p).theta_c == doctest::Approx(cr.theta_c).epsilon(1e-9));
    }
}

TEST_CASE("counts critical point is continuous as sigma goes to zero") {
    ModelParams p = P0;
    p.sigma = 0.0;
    auto at_zero = critical_counts(p);
    // g(y) = (b y + beta) e^{-a y} / beta is maximized at y = 1/a - beta/b.
    CHECK(at_zero.y_c == doctest::Approx(1.0 / p.a - p.beta / p.b).epsilon(1e-9));
    p.sigma = 1e-6;
    auto near_zero = critical_counts(p);
    CHECK(std::abs(near_zero.theta_c - at_zero.theta_c) < 1e-4);
    CHECK(std::abs(near_zero.y_c - at_zero.y_c) < 1e-4);
}

TEST_CASE("root curve basics") {
    for (auto fn : {Functional::IntegralR, Functional::Counts}) {
        CgfCurve curve(P0, fn);
        CHECK(curve.y(0.0).value() == 0.0);
        CHECK(curve.gamma(0.0) == 0.0);
        CHECK(curve.y(curve.theta_c()).value() == doctest::Approx(curve.y_c()).epsilon(1e-8));
        CHECK_FALSE(curve.y(curve.theta_c() + 1e-6).has_value());
        CHECK(curve.gamma(curve.theta_c() + 1e-6) == inf);
        for (double t : {-50.0, -1.0, 0.1, 0.5 * curve.theta_c()}) {
            double y = curve.y(t).value();
            CHECK(std::abs(curve.root_equation(y, t)) < 1e-12);
            CHECK(curve.root_equation_dy(y, t) < 0.0);
        }
    }
}

TEST_CASE("y(theta) is increasing and bounded by y_c") {
    for (auto fn : {Functional::IntegralR, Functional::Counts}) {
        CgfCurve curve(P0, fn);
        double prev = -inf;
        for (int i = 0; i <= 400; ++i) {
            double t = i == 400 ? curve.theta_c() : -10.0 + (curve.theta_c() + 10.0) * i / 400.0;
            double y = curve.y(t).value();
            CHECK(y > prev);
            CHECK(y <= curve.y_c() + 1e-9);
            prev = y;
        }
    }
}

TEST_CASE("CGF values at theta = 0.1") {
    CHECK(gamma(P0, Functional::IntegralR, 0.1) == doctest::Approx(0.172180506329246233658).epsilon(1e-12));
    CHECK(gamma(P0, Functional::Counts, 0.1) == doctest::Approx(0.297809719685037511417).epsilon(1e-12));
}

TEST_CASE("CGF derivatives recover the law of large numbers and CLT constants") {
    auto lc = analytics::limit_constants(P0);
    for (auto fn : {Functional::IntegralR, Functional::Counts}) {
        CgfCurve curve(P0, fn);
        const double h = 1e-5 * std::max(1.0, curve.theta_c());
        double fd = (curve.gamma(h) - curve.gamma(-h)) / (2.0 * h);
        double lln = fn == Functional::IntegralR ? lc.lln_integral : lc.lln_counts;
        CHECK(std::abs(fd - lln) <= 1e-4 * lln);

        auto pt = curve.point(0.0);
        CHECK(pt.dgamma == doctest::Approx(lln).epsilon(1e-12));
        double var = fn == Functional::IntegralR ? lc.clt_var_integral : lc.clt_var_counts_closed_form;
        CHECK(pt.d2gamma == doctest::Approx(var).epsilon(1e-12));
    }
}

TEST_CASE("implicit derivatives agree with finite differences") {
    for (auto fn : {Functional::IntegralR, Functional::Counts}) {
        CgfCurve curve(P0, fn);
        for (double t : {-3.0, -0.5, 0.2, 0.8 * curve.theta_c()}) {
            auto pt = curve.point(t);
            const double h = 1e-5;
            double g1 = (curve.gamma(t + h) - curve.gamma(t - h)) / (2.0 * h);
            double g2 = (curve.gamma(t + h) - 2.0 * curve.gamma(t) + curve.gamma(t - h)) / (h * h);
            double y1 = (curve.y(t + h).value() - curve.y(t - h).value()) / (2.0 * h);
            CHECK(pt.dgamma == doctest::Approx(g1).epsilon(1e-7));
            CHECK(pt.d2gamma == doctest::Approx(g2).epsilon(1e-3));
            CHECK(pt.dy == doctest::Approx(y1).epsilon(1e-7));
        }
    }
}

TEST_CASE("rate function vanishes at the mean and matches the local quadratic") {
    auto lc = analytics::limit_constants(P0);
    struct Case {
        Functional fn;
        double mean, var;
    };
    for (auto c : {Case{Functional::IntegralR, lc.lln_integral, lc.clt_var_integral},
                   Case{Functional::Counts, lc.lln_counts, lc.clt_var_counts_closed_form}}) {
        CgfCurve curve(P0, c.fn);
        auto at_mean = curve.rate(c.mean);
        CHECK(std::abs(at_mean.I) < 1e-12);
        CHECK(std::abs(at_mean.theta_star) < 1e-9);
        for (double eps : {-1e-2, 1e-2, 3e-3}) {
            double I = curve.rate(c.mean + eps).I;
            double quad = eps * eps / (2.0 * c.var);
            CHECK(std::abs(I - quad) <= 0.05 * quad);
        }
    }
}

TEST_CASE("rate function agrees with an independent Legendre maximization") {
    for (auto fn : {Functional::IntegralR, Functional::Counts}) {
        CgfCurve curve(P0, fn);
        for (double x : {0.7, 2.0, 4.0}) {
            auto r = curve.rate(x);
            double bf = brute_force_rate(curve, x, -20.0, curve.theta_c());
            CHECK(std::abs(r.I - bf) < 1e-6);
            CHECK(r.kind == ThetaStarKind::Interior);
            CHECK(curve.point(r.theta_star).dgamma == doctest::Approx(x).epsilon(1e-9));
        }
    }
}

TEST_CASE("rate function is convex with a unique zero") {
    for (auto fn : {Functional::IntegralR, Functional::Counts}) {
        CgfCurve curve(P0, fn);
        std::vector<double> xs, Is;
        for (int i = 0; i <= 200; ++i) {
            xs.push_back(0.05 + 10.0 * i / 200.0);
            Is.push_back(curve.rate(xs.back()).I);
        }
        int zeros = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            CHECK(Is[i] >= 0.0);
            if (Is[i] < 1e-4) ++zeros;
        }
        CHECK(zeros <= 2);
        for (std::size_t i = 1; i + 1 < xs.size(); ++i) CHECK(Is[i - 1] - 2.0 * Is[i] + Is[i + 1] >= -1e-9);
    }
}

TEST_CASE("rate function outside and on the edge of the support") {
    CHECK(rate_function(P0, Functional::IntegralR, -0.5).I == inf);
    CHECK(rate_function(P0, Functional::Counts, -1.0).I == inf);
    CHECK(rate_function(P0, Functional::IntegralR, -0.5).kind == ThetaStarKind::Unbounded);

    // Staying at zero is impossible when c > 0, but the count rate at x = 0 is
    // finite: alpha - b c y_-, y_- = -2 beta / (b + sqrt(b^2 + 2 sigma^2 beta)).
    auto zero = rate_function(P0, Functional::Counts, 0.0);
    CHECK(zero.kind == ThetaStarKind::MinusInfinity);
    CHECK(zero.I == doctest::Approx(1.0 + 4.0 / (2.0 + std::sqrt(6.0))).epsilon(1e-10));
    CHECK(rate_function(P0, Functional::IntegralR, 0.0).I == inf);

    // Far right tail: the maximizer approaches theta_c and the rate grows with
    // slope theta_c.
    CgfCurve curve(P0, Functional::IntegralR);
    auto r1 = curve.rate(50.0), r2 = curve.rate(60.0);
    CHECK(r1.kind == ThetaStarKind::Interior);
    CHECK(r1.theta_star < r2.theta_star);
    CHECK(r2.theta_star < curve.theta_c());
    auto far1 = curve.rate(1e9), far2 = curve.rate(2e9);
    CHECK(far1.kind == ThetaStarKind::CappedAtCritical);
    CHECK((far2.I - far1.I) / 1e9 == doctest::Approx(curve.theta_c()).epsilon(1e-9));
}

TEST_CASE("counts functional without self-excitation is Poisson") {
    ModelParams p{0.5, 2.0, 1.0, 1.3, 0.0, 1.0};
    CgfCurve curve(p, Functional::Counts);
    CHECK(curve.theta_c() == inf);
    for (double t : {-2.0, 0.0, 1.0, 3.0}) CHECK(curve.gamma(t) == doctest::Approx(p.alpha * std::expm1(t)).epsilon(1e-12));
    for (double x : {0.2, 1.3, 4.0}) {
        double poisson = x * std::log(x / p.alpha) - x + p.alpha;
        CHECK(curve.rate(x).I == doctest::Approx(poisson).epsilon(1e-9));
    }
    CHECK(curve.rate(0.0).I == doctest::Approx(p.alpha).epsilon(1e-12));
}

TEST_CASE("long-run yield") {
    auto ly = long_run_yield(P0);
    CHECK(ly.x_star == doctest::Approx(-0.54500650142694375039).epsilon(1e-12));
    CHECK(ly.exponent == doctest::Approx(-1.32854204900659362166).epsilon(1e-12));
    double x = ly.x_star;
    double resid = -P0.b * x + 0.5 * P0.sigma * P0.sigma * x * x + P0.beta * std::expm1(P0.a * x) - 1.0;
    CHECK(std::abs(resid) < 1e-12);
    // The bond exponent is the integral CGF at theta = -1.
    CHECK(ly.exponent == doctest::Approx(gamma(P0, Functional::IntegralR, -1.0)).epsilon(1e-12));

    ModelParams no_feedback{0.5, 2.0, 1.0, 1.0, 0.0, 0.0};
    CHECK(long_run_yield(no_feedback).x_star == doctest::Approx(-1.0 / no_feedback.b).epsilon(1e-14));
}
