#include "hawkes_cir/ldp.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "hawkes_cir/error.hpp"

namespace hawkes_cir::ldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Root of f on [lo, hi] given opposite signs at the endpoints.
template <class F>
double solve_bracketed(F&& f, double lo, double hi, double flo, double fhi) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) {
        throw Error(Errc::BracketFailure, "",
                    "root not bracketed on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    boost::uintmax_t max_iter = 500;
    auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 1);
    auto [r0, r1] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
    // Pick the endpoint with the smaller residual.
    return std::abs(f(r0)) <= std::abs(f(r1)) ? r0 : r1;
}

/// Walks `from + sign * span` outward, doubling span, until f changes sign
/// relative to f(from). Returns the far endpoint.
template <class F>
std::optional<double> expand(F&& f, double from, double sign, double span = 1.0) {
    const bool from_negative = f(from) < 0.0;
    for (int i = 0; i < 1100; ++i) {
        double x = from + sign * span;
        if (!std::isfinite(x)) break;
        double fx = f(x);
        if (fx == 0.0 || (fx < 0.0) != from_negative) return x;
        span *= 2.0;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Functional f) noexcept {
    return f == Functional::IntegralR ? "integral" : "counts";
}

Critical critical_integral(const ModelParams& p) {
    double s2 = p.sigma * p.sigma;
    double ab = p.a * p.beta;
    double hi = kInf;
    if (s2 > 0.0) hi = p.b / s2;
    if (ab > 0.0 && p.a > 0.0) hi = std::min(hi, std::log(p.b / ab) / p.a);
    if (!std::isfinite(hi)) return {kInf, kInf};

    auto h = [&](double y) { return s2 * y + ab * std::exp(p.a * y) - p.b; };
    double y_c = solve_bracketed(h, 0.0, hi, h(0.0), h(hi));
    double theta_c = p.b * y_c - 0.5 * s2 * y_c * y_c - p.beta * std::expm1(p.a * y_c);
    return {y_c, theta_c};
}

Critical critical_counts(const ModelParams& p) {
    if (p.beta == 0.0) return {kInf, kInf};
    double s2 = p.sigma * p.sigma;
    if (p.a == 0.0) {
        if (s2 == 0.0) return {kInf, kInf};
        return {p.b / s2, std::log1p(p.b * p.b / (2.0 * s2 * p.beta))};
    }
    if (s2 == 0.0) return critical_counts_by_maximization(p);

    double S = std::sqrt(s2 * s2 + p.a * p.a * p.b * p.b + 2.0 * p.a * p.a * s2 * p.beta);
    // (s2 + ab - S) / (a s2), multiplied through by its conjugate.
    double y_c = 2.0 * p.net_reversion() / (s2 + p.a * p.b + S);
    double theta_c = std::log((p.b - s2 * y_c) / (p.a * p.beta)) - p.a * y_c;
    return {y_c, theta_c};
}

Critical critical_counts_by_maximization(const ModelParams& p) {
    if (p.beta == 0.0) return {kInf, kInf};
    double s2 = p.sigma * p.sigma;
    // g'(y) e^{a y} beta = (b - s2 y) - a (b y - s2 y^2 / 2 + beta); positive at 0.
    auto dg = [&](double y) { return (p.b - s2 * y) - p.a * (p.b * y - 0.5 * s2 * y * y + p.beta); };
    auto hi = expand(dg, 0.0, 1.0);
    if (!hi) return {kInf, kInf};
    double y_c = solve_bracketed(dg, 0.0, *hi, dg(0.0), dg(*hi));
    double g = (p.b * y_c - 0.5 * s2 * y_c * y_c + p.beta) / p.beta;
    return {y_c, std::log(g) - p.a * y_c};
}

double critical_counts_subtractive_theta(const ModelParams& p) {
    double s2 = p.sigma * p.sigma;
    double S = std::sqrt(s2 * s2 + p.a * p.a * p.b * p.b + 2.0 * p.a * p.a * s2 * p.beta);
    return std::log((S - s2) / (p.a * p.a * p.beta)) - (s2 + p.a * p.b - S) / s2;
}

CgfCurve::CgfCurve(const ModelParams& params, Functional functional, LdpTolerances tol)
    : params_(params), functional_(functional), tol_(tol),
      critical_(functional == Functional::IntegralR ? critical_integral(params) : critical_counts(params)) {}

double CgfCurve::root_equation(double y, double theta) const noexcept {
    const auto& p = params_;
    double shift = functional_ == Functional::Counts ? theta : 0.0;
    double constant = functional_ == Functional::IntegralR ? theta : 0.0;
    return -p.b * y + 0.5 * p.sigma * p.sigma * y * y + p.beta * std::expm1(p.a * y + shift) + constant;
}

double CgfCurve::root_equation_dy(double y, double theta) const noexcept {
    const auto& p = params_;
    double shift = functional_ == Functional::Counts ? theta : 0.0;
    return -p.b + p.sigma * p.sigma * y + p.a * p.beta * std::exp(p.a * y + shift);
}

double CgfCurve::gamma_from_root(double y, double theta) const noexcept {
    const auto& p = params_;
    double shift = functional_ == Functional::Counts ? theta : 0.0;
    return p.b * p.c * y + p.alpha * std::expm1(p.a * y + shift);
}

std::optional<double> CgfCurve::root_equation_minimizer(double theta) const {
    const auto& p = params_;
    if (p.sigma == 0.0 && p.a * p.beta == 0.0) return std::nullopt;
    if (functional_ == Functional::IntegralR) return critical_.y_c;
    auto dF = [&](double y) { return root_equation_dy(y, theta); };
    double d0 = dF(0.0);
    if (d0 == 0.0) return 0.0;
    auto far = expand(dF, 0.0, d0 < 0.0 ? 1.0 : -1.0);
    if (!far) return std::nullopt;
    double lo = std::min(0.0, *far), hi = std::max(0.0, *far);
    return solve_bracketed(dF, lo, hi, dF(lo), dF(hi));
}

std::optional<double> CgfCurve::y(double theta) const {
    if (theta > critical_.theta_c) return std::nullopt;
    if (theta == 0.0) return 0.0;
    if (theta == critical_.theta_c) return critical_.y_c;

    auto F = [&](double y) { return root_equation(y, theta); };
    if (auto y_min = root_equation_minimizer(theta)) {
        double f_min = F(*y_min);
        // Tangency up to rounding.
        if (f_min >= 0.0) return *y_min;
        auto lo = expand(F, *y_min, -1.0);
        if (!lo) throw Error(Errc::BracketFailure, "theta", "no smaller root below the minimizer");
        return solve_bracketed(F, *lo, *y_min, F(*lo), f_min);
    }
    // Root equation strictly decreasing in y: a single root.
    double f0 = F(0.0);
    if (f0 == 0.0) return 0.0;
    auto far = expand(F, 0.0, f0 > 0.0 ? 1.0 : -1.0);
    if (!far) throw Error(Errc::BracketFailure, "theta", "cannot bracket the root");
    double lo = std::min(0.0, *far), hi = std::max(0.0, *far);
    return solve_bracketed(F, lo, hi, F(lo), F(hi));
}

double CgfCurve::gamma(double theta) const {
    auto root = y(theta);
    if (!root) return kInf;
    return gamma_from_root(*root, theta);
}

CgfPoint CgfCurve::point(double theta) const {
    auto root = y(theta);
    if (!root) {
        throw Error(Errc::BracketFailure, "theta", "derivatives requested beyond theta_c");
    }
    const auto& p = params_;
    const bool counts = functional_ == Functional::Counts;
    double yv = *root;
    double u = p.a * yv + (counts ? theta : 0.0);
    double eu = std::exp(u);
    double D = p.b - p.sigma * p.sigma * yv - p.a * p.beta * eu;

    CgfPoint pt{};
    pt.theta = theta;
    pt.y = yv;
    pt.gamma = gamma_from_root(yv, theta);
    if (!counts) {
        pt.dy = 1.0 / D;
        pt.d2y = (p.sigma * p.sigma + p.a * p.a * p.beta * eu) * pt.dy * pt.dy * pt.dy;
    } else {
        pt.dy = p.beta * eu / D;
        double du = p.a * pt.dy + 1.0;
        double dD = -p.sigma * p.sigma * pt.dy - p.a * p.beta * eu * du;
        pt.d2y = (p.beta * eu * du * D - p.beta * eu * dD) / (D * D);
    }
    double du = p.a * pt.dy + (counts ? 1.0 : 0.0);
    pt.dgamma = p.b * p.c * pt.dy + p.alpha * eu * du;
    pt.d2gamma = p.b * p.c * pt.d2y + p.alpha * eu * (du * du + p.a * pt.d2y);
    return pt;
}

double CgfCurve::gamma_at_minus_infinity() const {
    const auto& p = params_;
    if (functional_ == Functional::IntegralR) {
        if (p.b * p.c > 0.0) return -kInf;
        return p.a > 0.0 ? -p.alpha : 0.0;
    }
    // Smaller root of -b y + sigma^2 y^2 / 2 - beta = 0.
    double s2 = p.sigma * p.sigma;
    double y_minus = -2.0 * p.beta / (p.b + std::sqrt(p.b * p.b + 2.0 * s2 * p.beta));
    return p.b * p.c * y_minus - p.alpha;
}

RateFnResult CgfCurve::rate(double x) const {
    if (x < 0.0) return {x, kInf, -kInf, ThetaStarKind::Unbounded};
    if (x == 0.0) {
        double g = gamma_at_minus_infinity();
        if (!std::isfinite(g)) return {x, kInf, -kInf, ThetaStarKind::Unbounded};
        return {x, std::max(0.0, -g), -kInf, ThetaStarKind::MinusInfinity};
    }

    auto slope_gap = [&](double theta) { return point(theta).dgamma - x; };
    const double cap = critical_.theta_c - tol_.theta_cap;
    const double mean = point(0.0).dgamma;
    if (x == mean) return {x, 0.0, 0.0, ThetaStarKind::Interior};

    double lo = 0.0, hi = 0.0;
    if (x > mean) {
        hi = std::min(1.0, cap);
        while (slope_gap(hi) < 0.0) {
            if (hi >= cap) {
                return {x, cap * x - gamma(cap), cap, ThetaStarKind::CappedAtCritical};
            }
            lo = hi;
            hi = std::min(2.0 * hi, cap);
        }
    } else {
        lo = -1.0;
        while (slope_gap(lo) > 0.0) {
            hi = lo;
            lo *= 2.0;
            if (lo < tol_.theta_floor) return {x, kInf, -kInf, ThetaStarKind::Unbounded};
        }
    }

    // Safeguarded Newton on Gamma'(theta) = x; the gap is increasing in theta.
    double theta = 0.5 * (lo + hi);
    for (int iter = 0; iter < tol_.newton_max_iter; ++iter) {
        CgfPoint pt = point(theta);
        double gap = pt.dgamma - x;
        if (gap == 0.0) break;
        if (gap < 0.0) lo = theta; else hi = theta;
        double next = theta - gap / pt.d2gamma;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        double step = std::abs(next - theta);
        theta = next;
        if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(theta)) ||
            hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(theta))) {
            break;
        }
    }
    double value = theta * x - gamma(theta);
    return {x, std::max(0.0, value), theta, ThetaStarKind::Interior};
}

std::optional<double> y_of_theta(const ModelParams& params, Functional functional, double theta) {
    return CgfCurve(params, functional).y(theta);
}

double gamma(const ModelParams& params, Functional functional, double theta) {
    return CgfCurve(params, functional).gamma(theta);
}

RateFnResult rate_function(const ModelParams& params, Functional functional, double x) {
    return CgfCurve(params, functional).rate(x);
}

LongRunYield long_run_yield(const ModelParams& p) {
    auto f = [&](double x) {
        return -p.b * x + 0.5 * p.sigma * p.sigma * x * x + p.beta * std::expm1(p.a * x) - 1.0;
    };
    // f(0) = -1 and f is strictly decreasing on x <= 0.
    auto lo = expand(f, 0.0, -1.0);
    if (!lo) throw Error(Errc::BracketFailure, "x_star", "cannot bracket the negative root");
    double x_star = solve_bracketed(f, *lo, 0.0, f(*lo), f(0.0));
    return {x_star, p.b * p.c * x_star + p.alpha * std::expm1(p.a * x_star)};
}

}  // namespace hawkes_cir::ldp
