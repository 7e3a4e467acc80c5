#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sip/ladder_phase.hpp"

namespace sip {

enum class StateKind { MUCS, AOCS, Custom };
const char* to_string(StateKind k);

struct StateExpansion {
    StateKind kind = StateKind::Custom;
    MasterSpec spec;
    int m = 0;
    int n_trunc = 0;  // coefficients cover j = m..m+n_trunc
    CVec coeffs;
    std::map<std::string, cd> params;
    double tail_mass = 0.0;
    bool converged = true;
    int iterations = 0;
};

constexpr double kTailLimit = 1e-8;
constexpr int kHardCap = 512;

double tail_mass(const CVec& a);
void normalize(StateExpansion& st);

enum class RecursionMode { Exact, Printed };

struct MucsParams {
    double r = 0.0;                 // squeeze ratio <G>/(2 (dP)^2)
    std::optional<cd> C;            // eigenvalue; when absent C = K_mm + r p0 k0
    cd k0 = 0.0;
    cd seed0 = 1.0, seed1 = 0.0;    // a_m, a_{m+1}; seed1 only enters when the lower coupling is active
    bool self_consistent = false;
    int max_iter = 50;
};

// r at which X + i r P lowers like r p0 A~ on the first rung
double balanced_ratio(const LadderSet& ls);

StateExpansion mucs_recursion(const LadderSet& ls, const MucsParams& p, int n_trunc,
                              RecursionMode mode = RecursionMode::Exact);
StateExpansion mucs_two_term(const LadderSet& ls, cd k0, int n_trunc);

enum class Parity { Even, Odd };
bool is_symmetric(const MasterSpec& spec);
StateExpansion mucs_parity(const LadderSet& ls, double r, Parity parity, int n_trunc);
// normalized MUCS(k0) +- MUCS(-k0) at the same r
StateExpansion cat_state(const LadderSet& ls, double r, cd k0, Parity parity, int n_trunc);
// max |psi(-x) -+ psi(x)| / max |psi| over grid nodes whose mirror lies in the interval
double parity_defect(const EigenSystem& es, const StateExpansion& st, Parity parity);

struct AuditReport {
    cd mean_x, mean_p, mean_g;
    double var_x = 0.0, var_p = 0.0;
    double r_sc = 0.0;
    cd C_sc;
    double eigen_residual = 0.0;      // ||(X + i r_sc P) a - C_sc a|| / (||a|| ||X||)
    double saturation_defect = 0.0;   // dX dP - |<G>|/2
    double relative_defect = 0.0;     // divided by |<G>|
};

AuditReport uncertainty_audit(const LadderSet& ls, const StateExpansion& st);
// residual for a given r and C
double eigen_residual(const LadderSet& ls, const StateExpansion& st, double r, cd C);

enum class FMode { Consistent, Printed };
std::vector<double> aocs_f(const LadderSet& ls, FMode mode);
StateExpansion aocs_recursion(const LadderSet& ls, cd beta0, int n_trunc, FMode mode = FMode::Consistent);
// ||F(H) A~ a - beta0 a||
double aocs_residual(const LadderSet& ls, const StateExpansion& st, cd beta0, FMode mode);

// Generating function: sum_n t^n/n! phi_n^{(m)}(x) against (d/dx)^m [W(z)/W(x) dz/dx], z = x + t A(z).
// Both sides omit the common (-1)^m A^{m/2} factor.
double generating_series(const MasterSpec& spec, int m, double t, double x, int cap = 150);
double generating_closed(const MasterSpec& spec, int m, double t, double x);
// radius of convergence in t at x
double lagrange_radius(const MasterSpec& spec, double x);

struct GeneratingCheck {
    double max_rel_diff = 0.0;
    int compared = 0;
    int skipped = 0;
};
GeneratingCheck generating_check(const MasterSpec& spec, int m, double t, const Grid& grid);

cd overlap(const StateExpansion& a, const StateExpansion& b);

// psi(x) = sum a_j psi_j(x) at the grid nodes
std::vector<cd> grid_samples(const EigenSystem& es, const StateExpansion& st);

}  // namespace sip
