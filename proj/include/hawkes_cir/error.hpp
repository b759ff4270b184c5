#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hawkes_cir {

enum class Errc {
    NegativeParameter,
    StabilityViolated,
    PositivityViolated,
    StepSizeInvalid,
    NonFiniteState,
    ToleranceNotMet,
    ConvergenceTimeout,
    BracketFailure,
    ConfigError,
};

std::string_view to_string(Errc code) noexcept;

/// Library error carrying a machine-readable code and, where it applies,
/// the name of the offending field.
class Error : public std::runtime_error {
public:
    Error(Errc code, std::string field, const std::string& message)
        : std::runtime_error(message), code_(code), field_(std::move(field)) {}

    Errc code() const noexcept { return code_; }
    const std::string& field() const noexcept { return field_; }

private:
    Errc code_;
    std::string field_;
};

}  // namespace hawkes_cir
