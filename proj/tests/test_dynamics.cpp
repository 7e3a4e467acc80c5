#include <doctest.h>

#include <cmath>
#include <string>

#include "sip/coherent_states.hpp"
#include "sip/dynamics.hpp"

using namespace sip;

namespace {

struct Fixture {
    EigenSystem es;
    LadderSet ls;
    EvolutionSet ev;
    Fixture(const MasterSpec& s, int m, int nmax)
        : es(build_eigensystem(s, m, sector_cap(s, m, nmax))), ls(build_ladder(es, nmax)), ev(build_evolution(ls, es)) {}
};

}  // namespace

TEST_CASE("conjugation at t = 0 is the identity") {
    Fixture f(preset("scarf1_trigonometric"), 0, 12);
    auto [x, p] = evolution_oracle(f.ev, 0.0);
    CHECK(max_abs(x - f.ev.x) == 0.0);
    CHECK(max_abs(p - f.ev.p) == 0.0);
}

TEST_CASE("oscillator trajectories") {
    const double al = 1.5;
    Fixture f(preset("shifted_oscillator", {{"alpha", al}}), 0, 16);
    CHECK(f.ev.b0 == 0.0);
    for (const auto& w : f.ev.omegaH_diag) CHECK(std::abs(w) == doctest::Approx(al).epsilon(1e-12));
    for (double t : {0.2, 1.1, 3.0}) {
        auto [x, p] = evolution_oracle(f.ev, t);
        // x(t) = x cos(al t) + p sin(al t) / (mass al), mass = 1/2
        const CMat xe = f.ev.x * std::cos(al * t) + f.ev.p * (2.0 * std::sin(al * t) / al);
        const CMat pe = f.ev.p * std::cos(al * t) - f.ev.x * (al * std::sin(al * t) / 2.0);
        CHECK(max_abs(x - xe) < 1e-12);
        CHECK(max_abs(p - pe) < 1e-12);
        CHECK(std::abs(x(0, 1) - std::exp(cd(0.0, -al * t)) * f.ev.x(0, 1)) < 1e-14);
    }
    // period 2 pi / al
    auto [xT, pT] = evolution_oracle(f.ev, 2 * M_PI / al);
    CHECK(max_abs(xT - f.ev.x) < 1e-12);
}

TEST_CASE("Heisenberg equation, spectrum invariance and hermiticity on every preset") {
    for (const auto& name : preset_names()) {
        INFO(name);
        Fixture f(preset(name), 0, 14);
        const auto c = dynamics_checks(f.ev, 0.3);
        CHECK(c.heisenberg_x < 1e-6);
        CHECK(c.heisenberg_p < 1e-6);
        CHECK(c.spectrum_shift < 1e-10);
        CHECK(c.hermiticity < 1e-12);
        CHECK(std::isfinite(c.closed_x));
        CHECK(std::isfinite(c.closed_p));
        CHECK(g_closed_defect(f.ev) < 1e-8);
    }
}

TEST_CASE("series solution reproduces the oracle for the oscillator") {
    Fixture f(preset("shifted_oscillator"), 0, 20);
    for (double t : {0.1, 0.5, 1.0}) {
        INFO("t=" << t);
        const auto s = heisenberg_series(f.ev, t);
        REQUIRE(s.converged);
        CHECK(frobenius_block(s.x, evolution_oracle(f.ev, t).first, 2) < 1e-10);
    }
}

TEST_CASE("coherent-state moments follow the classical orbit") {
    const double al = 1.0;
    Fixture f(preset("shifted_oscillator", {{"alpha", al}}), 0, 60);
    const auto st = mucs_two_term(f.ls, 0.8, 60);
    const auto m0 = state_moments(f.ev, st.coeffs, 0.0, false);
    for (double t : {0.4, 1.7}) {
        const auto mt = state_moments(f.ev, st.coeffs, t, false);
        const cd xe = m0.mean_x * std::cos(al * t) + m0.mean_p * (2.0 * std::sin(al * t) / al);
        CHECK(std::abs(mt.mean_x - xe) < 1e-10);
        CHECK(mt.dx == doctest::Approx(m0.dx).epsilon(1e-10));
        CHECK(mt.dp == doctest::Approx(m0.dp).epsilon(1e-10));
    }
}

TEST_CASE("evolution set errors") {
    Fixture f(preset("shifted_oscillator"), 0, 10);
    const auto other = build_eigensystem(preset("shifted_oscillator"), 1, 10);
    CHECK_THROWS_AS(build_evolution(f.ls, other), Error);
}
