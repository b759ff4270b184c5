#pragma once

#include <optional>
#include <string_view>

#include "hawkes_cir/model_params.hpp"

namespace hawkes_cir::ldp {

/// Functional whose long-time cumulant generating function is studied:
/// the time integral of r or the jump count N.
enum class Functional { IntegralR, Counts };

std::string_view to_string(Functional f) noexcept;

/// Tangency point of the root equation. theta_c (and y_c) are +inf when the
/// root equation has a solution for every theta (degenerate parameters).
struct Critical {
    double y_c;
    double theta_c;
};

/// y_c solves b = sigma^2 y + beta a e^{a y}; theta_c = b y_c - sigma^2 y_c^2 / 2 - beta (e^{a y_c} - 1).
Critical critical_integral(const ModelParams& params);

/// Closed form for sigma > 0; sigma == 0 goes through
/// critical_counts_by_maximization.
Critical critical_counts(const ModelParams& params);

/// Maximizes g(y) = (b y - sigma^2 y^2 / 2 + beta) e^{-a y} / beta over y >= 0
/// by root-finding on g'(y) = 0; theta_c = log g(y_c).
Critical critical_counts_by_maximization(const ModelParams& params);

/// theta_c for the counts functional in the subtraction form
///   log((S - sigma^2) / (a^2 beta)) - (sigma^2 + a b - S) / sigma^2,
///   S = sqrt(sigma^4 + a^2 b^2 + 2 a^2 sigma^2 beta).
/// Needs a, beta, sigma > 0.
double critical_counts_subtractive_theta(const ModelParams& params);

/// Value and theta-derivatives of the root curve y(theta) and of Gamma(theta)
/// at a point of the domain, obtained by implicit differentiation.
struct CgfPoint {
    double theta;
    double y;
    double dy;
    double d2y;
    double gamma;
    double dgamma;
    double d2gamma;
};

/// Where the Legendre maximizer ended up.
enum class ThetaStarKind {
    Interior,          ///< Gamma'(theta*) = x
    CappedAtCritical,  ///< x beyond Gamma'(theta_c - cap); theta* = theta_c - cap
    MinusInfinity,     ///< supremum approached as theta -> -inf (finite limit)
    Unbounded,         ///< x outside the effective domain; I = +inf
};

struct RateFnResult {
    double x;
    double I;
    double theta_star;
    ThetaStarKind kind;
};

struct LdpTolerances {
    /// Distance below theta_c at which the Legendre search is capped.
    double theta_cap = 1e-12;
    /// Most negative theta tried when bracketing the Legendre maximizer.
    double theta_floor = -1e15;
    int newton_max_iter = 200;
};

/// Limiting CGF of one functional, with its domain boundary and root curve.
/// Immutable once constructed.
class CgfCurve {
public:
    CgfCurve(const ModelParams& params, Functional functional, LdpTolerances tol = {});

    Functional functional() const noexcept { return functional_; }
    const ModelParams& params() const noexcept { return params_; }
    double theta_c() const noexcept { return critical_.theta_c; }
    double y_c() const noexcept { return critical_.y_c; }

    /// Left side of the root equation at (y, theta).
    double root_equation(double y, double theta) const noexcept;
    /// Its derivative in y.
    double root_equation_dy(double y, double theta) const noexcept;

    /// Smaller root for theta <= theta_c; std::nullopt (diverged) beyond.
    std::optional<double> y(double theta) const;
    /// Gamma(theta), +inf past theta_c.
    double gamma(double theta) const;
    /// Requires theta < theta_c (derivatives blow up at the boundary).
    CgfPoint point(double theta) const;
    /// Legendre transform sup_{theta <= theta_c} { theta x - Gamma(theta) }.
    RateFnResult rate(double x) const;

private:
    double gamma_from_root(double y, double theta) const noexcept;
    /// Minimizer of the convex root equation in y, if one exists.
    std::optional<double> root_equation_minimizer(double theta) const;
    /// lim Gamma(theta) as theta -> -inf (may be -inf).
    double gamma_at_minus_infinity() const;

    ModelParams params_;
    Functional functional_;
    LdpTolerances tol_;
    Critical critical_;
};

std::optional<double> y_of_theta(const ModelParams& params, Functional functional, double theta);
double gamma(const ModelParams& params, Functional functional, double theta);
RateFnResult rate_function(const ModelParams& params, Functional functional, double x);

struct LongRunYield {
    double x_star;    ///< unique negative root of -b x + sigma^2 x^2/2 + beta (e^{a x} - 1) - 1
    double exponent;  ///< lim (1/T) log P = b c x* + alpha (e^{a x*} - 1)
};

LongRunYield long_run_yield(const ModelParams& params);

}  // namespace hawkes_cir::ldp
