#pragma once

#include <string_view>

#include <json.hpp>

namespace hawkes_cir {

/// Coefficients of dr = b(c - r)dt + a dN + sigma sqrt(r) dW, where N has
/// intensity alpha + beta r.
///
/// Units: a and c in rate units, b in 1/time, alpha in 1/time, beta in
/// 1/(rate*time), sigma in rate^{1/2}/time^{1/2}. Units are not enforced.
struct ModelParams {
    double a = 0.0;      ///< jump size
    double b = 0.0;      ///< mean-reversion speed
    double c = 0.0;      ///< reversion level
    double alpha = 0.0;  ///< baseline jump intensity
    double beta = 0.0;   ///< intensity sensitivity to r
    double sigma = 0.0;  ///< diffusion volatility

    /// Effective reversion speed b - a*beta of the mean dynamics.
    double net_reversion() const noexcept { return b - a * beta; }

    /// Stationary mean (bc + a alpha) / (b - a beta).
    double stationary_mean() const noexcept {
        return (b * c + a * alpha) / net_reversion();
    }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Structural reductions of the model.
enum class ModelClass { Full, ClassicalCIR, PoissonJumpCIR, PureHawkes };

std::string_view to_string(ModelClass cls) noexcept;

/// Reference parameter set (a=0.5, b=2, c=1, alpha=1, beta=1, sigma=1).
constexpr ModelParams reference_params() noexcept {
    return ModelParams{0.5, 2.0, 1.0, 1.0, 1.0, 1.0};
}

/// Returns `params` unchanged when every coefficient is finite and
/// nonnegative, b > a*beta, and 2bc >= sigma^2. Throws hawkes_cir::Error
/// (NegativeParameter, StabilityViolated or PositivityViolated) otherwise.
ModelParams validate(const ModelParams& params);

/// Classification uses exact comparisons against zero. Precedence follows
/// the declaration order: ClassicalCIR, PoissonJumpCIR, PureHawkes, Full.
ModelClass classify(const ModelParams& params) noexcept;

/// Reads {"a","b","c","alpha","beta","sigma"}; missing keys keep the values
/// already in `base`. Does not validate.
ModelParams params_from_json(const nlohmann::json& j, ModelParams base = {});
nlohmann::json params_to_json(const ModelParams& params);

}  // namespace hawkes_cir
