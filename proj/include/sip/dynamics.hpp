#pragma once

#include <utility>
#include <vector>

#include "sip/ladder_phase.hpp"

namespace sip {

struct EvolutionSet {
    int m = 0;
    double mass = 0.5;
    double b0 = 0.0;
    double omega0 = 0.0;
    std::vector<double> energies;
    std::vector<double> b1_diag;
    std::vector<cd> omegaH_diag;  // complex when B0^2 - 4 B1/m < 0
    std::vector<cd> r_plus, r_minus;
    CMat x, p;

    int size() const { return static_cast<int>(energies.size()); }
};

EvolutionSet build_evolution(const LadderSet& ls, const EigenSystem& es);
double b1_value(const Sector& s, double E);

// closed forms with H-functions multiplied on the right
CMat heisenberg_xt(const EvolutionSet& ev, double t);
CMat heisenberg_pt(const EvolutionSet& ev, double t);

// e^{iHt} O e^{-iHt} in the energy basis
CMat conjugate(const CMat& op, const std::vector<double>& energies, double t);
std::pair<CMat, CMat> evolution_oracle(const EvolutionSet& ev, double t);

// sum_n (it)^n/n! (X f_n + P g_n) from the f/g recursion
struct SeriesResult {
    CMat x;
    int terms = 0;
    bool converged = false;
};
SeriesResult heisenberg_series(const EvolutionSet& ev, double t, int max_terms = 40);
// max relative gap between recursive g_n and A r+^n + B r-^n, n <= n_max
double g_closed_defect(const EvolutionSet& ev, int n_max = 12);

// Frobenius distance over the leading block that excludes `trim` edge rows/columns
double frobenius_block(const CMat& a, const CMat& b, int trim = 2);

struct DynamicsChecks {
    double heisenberg_x = 0.0;   // central difference vs i[H, X]
    double heisenberg_p = 0.0;
    double spectrum_shift = 0.0; // eigenvalues of X(t) vs X
    double hermiticity = 0.0;
    double closed_x = 0.0;        // Frobenius distance oracle vs closed form
    double closed_p = 0.0;
    double series_vs_closed = 0.0;
};
DynamicsChecks dynamics_checks(const EvolutionSet& ev, double t, double h = 1e-5);

struct Moments {
    cd mean_x, mean_p;
    double dx = 0.0, dp = 0.0;
};
Moments state_moments(const EvolutionSet& ev, const CVec& a, double t, bool closed_form);

}  // namespace sip
