#include <doctest.h>

#include <cmath>

#include "sip/numerics.hpp"

using namespace sip;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
    for (int n : {4, 16, 64}) {
        auto [x, w] = gauss_legendre(n);
        REQUIRE(x.size() == static_cast<std::size_t>(n));
        for (int k = 0; k <= 2 * n - 1; k += 3) {
            double s = 0;
            for (int i = 0; i < n; ++i) s += w[i] * std::pow(x[i], k);
            const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
            CHECK(s == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
        }
    }
}

TEST_CASE("weighted integrals against Gamma and Beta closed forms") {
    SUBCASE("Gaussian moments on the line") {
        const auto s = preset("shifted_oscillator", {{"alpha", 2.0}});
        const auto g = build_grid(s);
        CHECK(g.map_kind == MapKind::Infinite);
        // int x^2 e^{-x^2} dx = sqrt(pi)/2
        CHECK(integrate(g, [](double x) { return x * x * std::exp(-x * x); }) ==
              doctest::Approx(std::sqrt(M_PI) / 2).epsilon(1e-12));
    }
    SUBCASE("x^a e^{-x} on the half-line") {
        const auto s = preset("three_dim_oscillator", {{"alpha", 2.5}});
        const auto g = build_grid(s);
        CHECK(g.map_kind == MapKind::SemiInfinite);
        CHECK(integrate(g, [](double x) { return std::pow(x, 2.5) * std::exp(-x); }) ==
              doctest::Approx(std::tgamma(3.5)).epsilon(1e-11));
    }
    SUBCASE("Beta integral on (0, 1)") {
        const auto s = preset("scarf1_trigonometric", {{"alpha", 2.0}, {"beta", 3.0}});
        const auto g = build_grid(s);
        CHECK(g.map_kind == MapKind::Finite);
        CHECK(integrate(g, [](double x) { return x * x * std::pow(1 - x, 3); }) == doctest::Approx(1.0 / 60).epsilon(1e-13));
    }
    SUBCASE("algebraic tail") {
        // int_1^inf (x^2-1) (x-1) (x+1)^{-60} dx = int (x-1)^2 (x+1)^{-59}
        const auto s = preset("gen_poschl_teller");
        const auto g = build_grid(s);
        const double exact = std::tgamma(3) * std::tgamma(56) / std::tgamma(59) * std::pow(2.0, -56);
        CHECK(integrate(g, [](double x) { return std::pow(x - 1, 2) * std::pow(x + 1, -59); }) ==
              doctest::Approx(exact).epsilon(1e-9));
    }
}

TEST_CASE("doubling npoints changes sector-weight integrals by < 1e-8") {
    for (const auto& n : preset_names()) {
        const auto s = preset(n);
        for (int m = 0; m <= 2; ++m) {
            INFO(n << " m=" << m);
            auto f = [&](double x) { return std::exp(s.weight.log_value(x)) * std::pow(s.A_at(x), m); };
            const double a = integrate(build_grid(s, 200, m), f), b = integrate(build_grid(s, 400, m), f);
            CHECK(std::abs(a - b) < 1e-8 * std::abs(b));
        }
    }
}

TEST_CASE("grid errors") {
    auto s = preset("shifted_oscillator");
    CHECK_THROWS_AS(build_grid(s, 4), Error);
    s.b = s.a;
    CHECK_THROWS_AS(build_grid(s), Error);
}

TEST_CASE("fixed-point solver") {
    // Dottie number: cos z = z
    const double dottie = 0.73908513321516064;
    CHECK(solve_fixed_point([](double z) { return std::cos(z); }, [](double z) { return -std::sin(z); }, 1.0, 1e-15) ==
          doctest::Approx(dottie).epsilon(1e-14));
    CHECK(solve_fixed_point([](double z) { return std::cos(z); }, nullptr, 1.0, 1e-14) ==
          doctest::Approx(dottie).epsilon(1e-12));
    CHECK_THROWS_AS(solve_fixed_point([](double z) { return z + 1.0; }, nullptr, 0.0, 1e-14, 20), Error);
}

TEST_CASE("Lagrange equation z = x + t A(z) against the quadratic formula") {
    // A = 1 + z^2: t z^2 - z + x + t = 0, branch through z = x
    const auto s = preset("scarf2_hyperbolic");
    for (double x : {-1.0, 0.0, 0.7}) {
        for (double t : {-0.1, 0.05, 0.1}) {
            const double z = solve_lagrange(s, x, t);
            const double exact = (1.0 - std::sqrt(1.0 - 4.0 * t * (x + t))) / (2.0 * t);
            CHECK(z == doctest::Approx(exact).epsilon(1e-13));
        }
    }
    // linear A: z = (x + t c0) / (1 - t c1)
    const auto s3 = preset("three_dim_oscillator");
    CHECK(solve_lagrange(s3, 2.0, 0.2) == doctest::Approx(2.0 / 0.8).epsilon(1e-14));
}
