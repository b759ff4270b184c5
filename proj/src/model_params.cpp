#include "hawkes_cir/model_params.hpp"

#include <cmath>
#include <string>

#include "hawkes_cir/error.hpp"

namespace hawkes_cir {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::NegativeParameter: return "NegativeParameter";
        case Errc::StabilityViolated: return "StabilityViolated";
        case Errc::PositivityViolated: return "PositivityViolated";
        case Errc::StepSizeInvalid: return "StepSizeInvalid";
        case Errc::NonFiniteState: return "NonFiniteState";
        case Errc::ToleranceNotMet: return "ToleranceNotMet";
        case Errc::ConvergenceTimeout: return "ConvergenceTimeout";
        case Errc::BracketFailure: return "BracketFailure";
        case Errc::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

std::string_view to_string(ModelClass cls) noexcept {
    switch (cls) {
        case ModelClass::Full: return "Full";
        case ModelClass::ClassicalCIR: return "ClassicalCIR";
        case ModelClass::PoissonJumpCIR: return "PoissonJumpCIR";
        case ModelClass::PureHawkes: return "PureHawkes";
    }
    return "Unknown";
}

namespace {

void require_nonnegative(double value, const char* field) {
    if (!std::isfinite(value) || value < 0.0) {
        throw Error(Errc::NegativeParameter, field,
                    std::string("parameter '") + field +
                        "' must be a finite nonnegative number, got " +
                        std::to_string(value));
    }
}

}  // namespace

ModelParams validate(const ModelParams& p) {
    require_nonnegative(p.a, "a");
    require_nonnegative(p.b, "b");
    require_nonnegative(p.c, "c");
    require_nonnegative(p.alpha, "alpha");
    require_nonnegative(p.beta, "beta");
    require_nonnegative(p.sigma, "sigma");

    // b > 0 follows from b > a*beta >= 0.
    if (!(p.b > p.a * p.beta)) {
        throw Error(Errc::StabilityViolated, "b",
                    "stability requires b > a*beta (b=" + std::to_string(p.b) +
                        ", a*beta=" + std::to_string(p.a * p.beta) + ")");
    }
    if (2.0 * p.b * p.c < p.sigma * p.sigma) {
        throw Error(Errc::PositivityViolated, "sigma",
                    "positivity requires 2*b*c >= sigma^2 (2bc=" +
                        std::to_string(2.0 * p.b * p.c) +
                        ", sigma^2=" + std::to_string(p.sigma * p.sigma) + ")");
    }
    return p;
}

ModelClass classify(const ModelParams& p) noexcept {
    if (p.a == 0.0 || (p.alpha == 0.0 && p.beta == 0.0)) return ModelClass::ClassicalCIR;
    if (p.beta == 0.0 && p.a > 0.0 && p.alpha > 0.0) return ModelClass::PoissonJumpCIR;
    if (p.c == 0.0 && p.sigma == 0.0) return ModelClass::PureHawkes;
    return ModelClass::Full;
}

ModelParams params_from_json(const nlohmann::json& j, ModelParams base) {
    if (!j.is_object()) {
        throw Error(Errc::ConfigError, "params", "model parameters must be a JSON object");
    }
    auto read = [&](const char* key, double& slot) {
        auto it = j.find(key);
        if (it == j.end()) return;
        if (!it->is_number()) {
            throw Error(Errc::ConfigError, key, std::string("parameter '") + key + "' must be a number");
        }
        slot = it->get<double>();
    };
    read("a", base.a);
    read("b", base.b);
    read("c", base.c);
    read("alpha", base.alpha);
    read("beta", base.beta);
    read("sigma", base.sigma);
    return base;
}

nlohmann::json params_to_json(const ModelParams& p) {
    return {{"a", p.a}, {"b", p.b}, {"c", p.c}, {"alpha", p.alpha}, {"beta", p.beta}, {"sigma", p.sigma}};
}

}  // namespace hawkes_cir
