#include <doctest.h>

#include <cmath>
#include <fstream>

#include "sip/master_catalog.hpp"

using namespace sip;

namespace {

ErrorCode code_of(const MasterSpec& s) {
    try {
        require_valid(s);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("spec unexpectedly valid");
    return ErrorCode::Parse;
}

MasterSpec custom(std::array<double, 3> a, WeightFamily w, double lo, double hi) {
    MasterSpec s;
    s.name = "custom";
    s.a_coeffs = a;
    s.weight = std::move(w);
    s.a = lo;
    s.b = hi;
    return s;
}

}  // namespace

TEST_CASE("every preset is admissible") {
    CHECK(preset_names().size() == 8);
    for (const auto& n : preset_names()) {
        INFO(n);
        const auto rep = validate(preset(n));
        CHECK(rep.ok());
        CHECK_FALSE(rep.first_error().has_value());
    }
}

TEST_CASE("drift line matches the hand-derived A W'/W") {
    // oscillator: W = exp(-alpha x^2/2), A = 1 -> s = -alpha x
    auto ho = preset("shifted_oscillator", {{"alpha", 2.5}});
    auto d = drift_line(ho);
    CHECK(d.C == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d.A1 == doctest::Approx(-2.5).epsilon(1e-12));
    // three-dimensional oscillator: W = x^alpha e^{-beta x}, A = x -> s = alpha - beta x
    auto d3 = drift_line(preset("three_dim_oscillator", {{"alpha", 1.5}, {"beta", 2.0}}));
    CHECK(d3.C == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(d3.A1 == doctest::Approx(-2.0).epsilon(1e-12));
    // Scarf I: W = x^a (1-x)^b, A = x(1-x) -> s = a(1-x) - b x
    auto ds = drift_line(preset("scarf1_trigonometric", {{"alpha", 2.0}, {"beta", 3.0}}));
    CHECK(ds.C == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(ds.A1 == doctest::Approx(-5.0).epsilon(1e-12));
}

TEST_CASE("validation failures carry their error codes") {
    SUBCASE("A changes sign inside the interval") {
        CHECK(code_of(custom({-1, 0, 1}, {WeightKind::Gaussian, {{"alpha", 1.0}}}, -2, 2)) == ErrorCode::NonPositiveA);
    }
    SUBCASE("growing weight") {
        CHECK(code_of(custom({1, 0, 0}, {WeightKind::Gaussian, {{"alpha", -1.0}}}, -INFINITY, INFINITY)) ==
              ErrorCode::WeightNotVanishing);
    }
    SUBCASE("A W'/W not linear") {
        // A = 1 with x^2 e^{-x}: s = 2/x - 1
        CHECK(code_of(custom({1, 0, 0}, {WeightKind::PowerExp, {{"alpha", 2.0}, {"beta", 1.0}}}, 0, INFINITY)) ==
              ErrorCode::DegreeViolation);
    }
    SUBCASE("degenerate interval") {
        CHECK(code_of(custom({1, 0, 0}, {WeightKind::Gaussian, {{"alpha", 1.0}}}, 1, 1)) ==
              ErrorCode::IntervalDegenerate);
    }
    SUBCASE("preset parameter outside its range") {
        CHECK(code_of(preset("three_dim_oscillator", {{"alpha", -2.0}})) != ErrorCode::Parse);
    }
    SUBCASE("unknown preset") {
        CHECK_THROWS_AS(preset("no_such_potential"), Error);
    }
}

TEST_CASE("validation error classification") {
    CHECK(is_validation_error(ErrorCode::NonPositiveA));
    CHECK(is_validation_error(ErrorCode::Parse));
    CHECK_FALSE(is_validation_error(ErrorCode::NoConvergence));
    CHECK_FALSE(is_validation_error(ErrorCode::DivergentRecursion));
}

TEST_CASE("normalizable window follows the bound-state count") {
    // Morse with W = x^alpha e^{-beta/x}: bound states n < (-alpha - 1)/2
    CHECK(max_normalizable_n(preset("morse"), 0) == 19);
    CHECK(max_normalizable_n(preset("morse", {{"alpha", -11.0}}), 0) == 4);
    // exponentially decaying weights never truncate
    CHECK(max_normalizable_n(preset("shifted_oscillator"), 0) >= kUnbounded);
    CHECK(max_normalizable_n(preset("scarf1_trigonometric"), 2) >= kUnbounded);
}

TEST_CASE("coordinate map satisfies dxi/dx = 1/sqrt(A)") {
    for (const auto& n : preset_names()) {
        INFO(n);
        const auto s = preset(n);
        for (double u : {0.3, 0.5, 0.7}) {
            double x;
            if (std::isfinite(s.a) && std::isfinite(s.b)) x = s.a + u * (s.b - s.a);
            else if (std::isfinite(s.a)) x = s.a + 2.0 * u;
            else x = 2.0 * (u - 0.5);
            const double h = 1e-5;
            const double d = (coordinate_map(s, x + h) - coordinate_map(s, x - h)) / (2 * h);
            CHECK(d == doctest::Approx(1.0 / std::sqrt(s.A_at(x))).epsilon(1e-7));
        }
    }
    // A = x gives xi = 2 sqrt(x) up to a constant
    const auto s3 = preset("three_dim_oscillator");
    CHECK(coordinate_map(s3, 4.0) - coordinate_map(s3, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("spec JSON round trip") {
    for (const auto& n : preset_names()) {
        const auto s = preset(n);
        CHECK(spec_from_json(spec_to_json(s)) == s);
    }
}

TEST_CASE("spec JSON parse errors report a line") {
    try {
        spec_from_json("{\n  \"name\": \"x\",\n  \"a_coeffs\": [1, 0\n}");
        FAIL("parse should fail");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Parse);
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
    CHECK_THROWS_AS(load_spec("/nonexistent/spec.json"), Error);
}

TEST_CASE("custom spec from file") {
    const std::string path = "test_master_catalog_spec.json";
    {
        std::ofstream f(path);
        f << R"({"name": "hermite", "a_coeffs": [1, 0, 0], "interval": ["-inf", "inf"],
                "weight": {"family": "gaussian", "params": {"alpha": 2.0}}})";
    }
    const auto s = load_spec(path);
    CHECK(s.weight.kind == WeightKind::Gaussian);
    CHECK(s.weight.param("alpha") == 2.0);
    CHECK(validate(s).ok());
    std::remove(path.c_str());
}
