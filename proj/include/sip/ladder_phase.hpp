#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "sip/eigensystem.hpp"

namespace sip {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

double mu_value(const MasterSpec& spec, int n, int m);

// f1..f4 of the adjoint formulas, per n
std::array<double, 4> f_coeffs(const Sector& s, int n);

// A(E - V_m) = eta1 x^2 + eta2 x + eta3
struct ClassicalPhase {
    double E = 0.0;
    double eta1 = 0.0, eta2 = 0.0, eta3 = 0.0;
    double cubic_residual = 0.0;  // fit mode only
    double omega_c = 0.0;
    double amplitude = 0.0;
    double offset = 0.0;
    double mass = 0.5;
    double x0 = 1.0;
    bool fitted = true;
};

ClassicalPhase classical_phase(const MasterSpec& spec, int m, double E, double x0 = 1.0, bool fit = true);
ClassicalPhase classical_phase(const EigenSystem& es, double E, double x0 = 1.0, bool fit = true);
std::array<double, 3> eta_printed(const MasterSpec& spec, int m, double E);
std::array<double, 2> classical_orbit(const ClassicalPhase& cp, double t);

struct LadderSet {
    MasterSpec spec;
    Sector sector;
    int m = 0;
    int nmax = 0;  // highest basis index
    bool clamped = false;
    double x0 = 1.0, p0 = 1.0;
    std::vector<double> mu;         // n = m+1..nmax
    std::vector<double> eps;        // factorization constants, n = m+1..nmax
    std::vector<double> e_over_mu;  // eps/mu, n = m+1..nmax
    std::vector<std::array<double, 4>> f;  // n = m..nmax
    std::vector<double> delta;      // offset eta2/(2 eta1) at each E(n,m)
    std::vector<double> energies;
    CMat a_tilde, b_tilde;          // lowering, raising
    CMat x_matrix, p_matrix, g_matrix;
    CMat g_exact;                   // untruncated commutator projected on the basis

    int size() const { return nmax - m + 1; }
    CMat h_matrix() const;
};

// Highest index the ladder basis may use in sector m.
int ladder_cap(const MasterSpec& spec, int m);

LadderSet build_ladder(const EigenSystem& es, int nmax, double x0 = 1.0, double p0 = 1.0);

// Grid-space operator c_d(n) A d/dx + c_x(n) x + c_0(n), coefficients evaluated at the column index n.
struct FirstOrderOp {
    std::function<double(int)> cd, cx, c0;
};

// <psi_i| op_j psi_j> by quadrature, i, j = m..m+count-1
CMat grid_matrix(const EigenSystem& es, const FirstOrderOp& op, int count);
// op_n applied to psi_k on the grid
std::vector<double> apply_on_grid(const EigenSystem& es, const FirstOrderOp& op, int n, int k);

FirstOrderOp op_a_tilde(const Sector& s);
FirstOrderOp op_b_tilde(const Sector& s);
FirstOrderOp op_a_dagger_printed(const Sector& s);
FirstOrderOp op_b_dagger_printed(const Sector& s);

struct PrintedForms {
    CMat a_dagger, b_dagger;  // as printed, by quadrature
    CMat x_ladder, p_ladder;    // x0[A+A^+ +B+B^+], (p0/2i)[A+B^+ -A^+ -B]
    CMat p_printed_sym;       // (p0/2i)(A d/dx + d/dx A)
    CMat p_hermitian;         // -i p0 (A d/dx + A'/4)
    CMat x_mult;              // x0 x
    double a_dagger_defect = 0.0;  // max |printed - true adjoint| on the inner block
    double b_dagger_defect = 0.0;
    double x_ladder_defect = 0.0;
    double p_ladder_defect = 0.0;
    double p_printed_defect = 0.0;
    double p_hermitian_defect = 0.0;
    double x_mult_defect = 0.0;
};

PrintedForms printed_forms(const LadderSet& ls, const EigenSystem& es);

double max_abs(const CMat& m);
double inner_block_diff(const CMat& a, const CMat& b, int trim);

}  // namespace sip
