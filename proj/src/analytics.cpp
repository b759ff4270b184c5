#include "hawkes_cir/analytics.hpp"

#include <cmath>
#include <limits>

#include "hawkes_cir/ldp.hpp"

namespace hawkes_cir::analytics {

double conditional_mean(const ModelParams& p, MomentQuery q) {
    const double k = p.net_reversion();
    const double m = p.stationary_mean();
    // m - e^{-k dt}(m - r0) == r0 - expm1(-k dt)(m - r0)
    return q.r0 - std::expm1(-k * q.dt) * (m - q.r0);
}

double conditional_second_moment(const ModelParams& p, MomentQuery q) {
    const double k = p.net_reversion();
    const double m = p.stationary_mean();
    const double drive = 2.0 * p.b * p.c + p.sigma * p.sigma + 2.0 * p.a * p.alpha + p.a * p.a * p.beta;

    const double e1 = std::exp(-k * q.dt);
    const double e2 = e1 * e1;
    const double one_minus_e2 = -std::expm1(-2.0 * k * q.dt);
    // e^{-x} - e^{-2x} = e^{-x}(1 - e^{-x})
    const double e1_minus_e2 = e1 * -std::expm1(-k * q.dt);

    const double stationary = drive * m / (2.0 * k) + p.a * p.a * p.alpha / (2.0 * k);
    return q.r0 * q.r0 * e2 + stationary * one_minus_e2 - drive * (m / k) * e1_minus_e2 +
           drive * (q.r0 / k) * e1_minus_e2;
}

double stationary_second_moment(const ModelParams& p) {
    const double k = p.net_reversion();
    const double drive = 2.0 * p.b * p.c + p.sigma * p.sigma + 2.0 * p.a * p.alpha + p.a * p.a * p.beta;
    return drive * p.stationary_mean() / (2.0 * k) + p.a * p.a * p.alpha / (2.0 * k);
}

double cir_conditional_mean(const ModelParams& p, MomentQuery q) {
    double e = std::exp(-p.b * q.dt);
    return q.r0 * e + p.c * (1.0 - e);
}

double cir_conditional_second_moment(const ModelParams& p, MomentQuery q) {
    double e = std::exp(-p.b * q.dt);
    double s2b = p.sigma * p.sigma / p.b;
    return q.r0 * (2.0 * p.c + s2b) * e + (q.r0 * q.r0 - q.r0 * s2b - 2.0 * q.r0 * p.c) * e * e +
           (p.c * p.sigma * p.sigma / (2.0 * p.b) + p.c * p.c) * (1.0 - e) * (1.0 - e);
}

double numeric_cgf_curvature(const ModelParams& params, bool counts, double h) {
    ldp::CgfCurve curve(params, counts ? ldp::Functional::Counts : ldp::Functional::IntegralR);
    return (curve.gamma(h) - 2.0 * curve.gamma(0.0) + curve.gamma(-h)) / (h * h);
}

LimitConstants limit_constants(const ModelParams& p) {
    const double k = p.net_reversion();
    const double k3 = k * k * k;
    const double mean_drive = p.b * p.c + p.a * p.alpha;
    const double s2 = p.sigma * p.sigma;

    LimitConstants out{};
    out.lln_integral = mean_drive / k;
    out.lln_counts = p.b * (p.alpha + p.beta * p.c) / k;
    out.clt_var_integral = (p.a * p.a * p.alpha * k + (p.a * p.a * p.beta + s2) * mean_drive) / k3;
    out.clt_var_counts = numeric_cgf_curvature(p, true);
    out.clt_var_counts_closed_form =
        (p.b * p.b * p.b * (p.alpha + p.beta * p.c) + s2 * p.beta * p.beta * mean_drive) / k3;
    out.clt_var_counts_uncorrected =
        p.a > 0.0 ? (p.b * p.b * p.b * p.a * p.a * (p.alpha + p.beta * p.c) + 4.0 * s2 * p.b * p.b * mean_drive) /
                        (p.a * p.a * k3)
                  : std::numeric_limits<double>::infinity();
    return out;
}

}  // namespace hawkes_cir::analytics
