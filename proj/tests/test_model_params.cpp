#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "hawkes_cir/error.hpp"
#include "hawkes_cir/model_params.hpp"

using namespace hawkes_cir;

namespace {

Errc error_of(const ModelParams& p) {
    try {
        validate(p);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected validate to throw");
    return Errc::ConfigError;
}

std::string field_of(const ModelParams& p) {
    try {
        validate(p);
    } catch (const Error& e) {
        return e.field();
    }
    return {};
}

}  // namespace

TEST_CASE("validate accepts and rejects the documented examples") {
    ModelParams ok{0.5, 2.0, 1.0, 1.0, 1.0, 1.0};
    CHECK(validate(ok) == ok);

    CHECK(error_of({1.0, 1.0, 1.0, 1.0, 2.0, 1.0}) == Errc::StabilityViolated);
    CHECK(error_of({0.0, 1.0, 0.1, 0.0, 0.0, 1.0}) == Errc::PositivityViolated);
}

TEST_CASE("negative or non-finite coefficients name the offending field") {
    auto p = reference_params();
    p.alpha = -1.0;
    CHECK(error_of(p) == Errc::NegativeParameter);
    CHECK(field_of(p) == "alpha");

    p = reference_params();
    p.sigma = std::numeric_limits<double>::quiet_NaN();
    CHECK(error_of(p) == Errc::NegativeParameter);
    CHECK(field_of(p) == "sigma");

    p = reference_params();
    p.c = std::numeric_limits<double>::infinity();
    CHECK(error_of(p) == Errc::NegativeParameter);
    CHECK(field_of(p) == "c");
}

TEST_CASE("boundary cases: 2bc == sigma^2 allowed, b == a beta rejected, b == 0 rejected") {
    ModelParams feller{0.5, 2.0, 0.25, 1.0, 1.0, 1.0};
    CHECK(2.0 * feller.b * feller.c == feller.sigma * feller.sigma);
    CHECK_NOTHROW(validate(feller));

    ModelParams critical{0.5, 2.0, 1.0, 1.0, 4.0, 1.0};
    CHECK(error_of(critical) == Errc::StabilityViolated);

    ModelParams no_reversion{0.0, 0.0, 1.0, 0.0, 0.0, 0.0};
    CHECK(error_of(no_reversion) == Errc::StabilityViolated);
}

TEST_CASE("validate is idempotent on random accepted parameters") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    int accepted = 0;
    for (int i = 0; i < 2000; ++i) {
        ModelParams p{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
        try {
            auto once = validate(p);
            CHECK(validate(once) == once);
            CHECK(once == p);
            ++accepted;
        } catch (const Error&) {
        }
    }
    CHECK(accepted > 100);
}

TEST_CASE("classify examples") {
    auto p = reference_params();
    CHECK(classify(p) == ModelClass::Full);

    p.a = 0.0;
    CHECK(classify(p) == ModelClass::ClassicalCIR);

    p = reference_params();
    p.alpha = 0.0;
    p.beta = 0.0;
    CHECK(classify(p) == ModelClass::ClassicalCIR);

    p = reference_params();
    p.beta = 0.0;
    p.a = 1.0;
    p.alpha = 1.0;
    CHECK(classify(p) == ModelClass::PoissonJumpCIR);

    p = reference_params();
    p.c = 0.0;
    p.sigma = 0.0;
    CHECK(classify(p) == ModelClass::PureHawkes);
}

TEST_CASE("classify is consistent with its defining predicates on a grid") {
    const double values[] = {0.0, 0.5, 1.0};
    int seen[4] = {0, 0, 0, 0};
    for (double a : values)
        for (double c : values)
            for (double alpha : values)
                for (double beta : values)
                    for (double sigma : values) {
                        ModelParams p{a, 3.0, c, alpha, beta, sigma};
                        try {
                            validate(p);
                        } catch (const Error&) {
                            continue;
                        }
                        ModelClass got = classify(p);
                        ModelClass want = ModelClass::Full;
                        if (a == 0.0 || (alpha == 0.0 && beta == 0.0)) want = ModelClass::ClassicalCIR;
                        else if (beta == 0.0 && a > 0.0 && alpha > 0.0) want = ModelClass::PoissonJumpCIR;
                        else if (c == 0.0 && sigma == 0.0) want = ModelClass::PureHawkes;
                        CHECK(got == want);
                        CHECK(classify(p) == got);
                        ++seen[static_cast<int>(got)];
                    }
    for (int n : seen) CHECK(n > 0);
}

TEST_CASE("params JSON keeps unspecified fields and rejects non-numbers") {
    auto j = params_to_json(reference_params());
    CHECK(params_from_json(j) == reference_params());

    auto partial = params_from_json(nlohmann::json{{"beta", 0.25}}, reference_params());
    CHECK(partial.beta == 0.25);
    CHECK(partial.a == 0.5);

    CHECK_THROWS_AS(params_from_json(nlohmann::json{{"a", "x"}}), Error);
    CHECK_THROWS_AS(params_from_json(nlohmann::json::array()), Error);
}
