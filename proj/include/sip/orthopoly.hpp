#pragma once

#include <vector>

#include "sip/master_catalog.hpp"
#include "sip/numerics.hpp"
#include "sip/polynomial.hpp"

namespace sip {

// Closed-form constants of sector m: the monic polynomials p_k = monic (d/dx)^m phi_k
// obey x p_k = p_{k+1} + b(k) p_k + c(k) p_{k-1}, and the ladder constants
// mu(k), eps(k) (eps(m) = 0) factorize the sector Hamiltonian.
struct Sector {
    int m = 0;
    double C = 0.0, A1 = 0.0;            // s(x) = A W'/W = C + A1 x
    double A0 = 0.0, Ap0 = 0.0, A2 = 0.0;  // A(0), A'(0), A''
    double gamma = 0.0;

    Sector() = default;
    Sector(const MasterSpec& spec, int m);

    double mu(int k) const { return -A1 - (k - 0.5) * A2; }
    double eps(int k) const;
    double energy(int n) const { return -(n - m + 1) * (A1 + 0.5 * (n + m) * A2) + gamma; }
    // conjugated-ladder coefficients: A~_k = A d/dx + u_k x + v_k, B~_k = -A d/dx + u'_k x + v'_k
    double u(int k) const { return -(0.5 * k * A2 + 0.25 * A2 + 0.5 * A1); }
    double up(int k) const { return -(0.5 * k * A2 + 0.5 * A1 - 0.25 * A2); }
    double v(int k) const;
    double vp(int k) const;
    double b(int k) const { return -(v(k) + vp(k + 1)) / mu(k + 1); }
    double c(int k) const { return eps(k) / (mu(k) * mu(k + 1)); }
    // log|leading coefficient| of the Rodrigues polynomial phi_n (a_n = 1) and its sign
    double log_lead(int n, int* sign) const;
};

struct PolySystem {
    MasterSpec spec;
    int max_n = 0;
    int requested_n = 0;
    bool truncated = false;
    std::vector<Poly> polys;
    std::vector<double> rodrigues_norm;
    std::vector<double> gammas;
    std::vector<double> norms;
};

double gamma_n(const MasterSpec& spec, int n);

// Rodrigues polynomial (1/W) (d/dx)^n (A^n W) as exact coefficients.
Poly rodrigues(const MasterSpec& spec, int n);

PolySystem build_polys(const MasterSpec& spec, int max_n, int npoints = kDefaultPoints);

double eigen_residual(const PolySystem& ps, int n, const Grid& grid);

struct AssociatedFunction {
    int n = 0, m = 0;
    Poly deriv;                  // (d/dx)^m phi_n
    std::vector<double> values;  // phi_{n,m} on the grid
};

AssociatedFunction associated(const PolySystem& ps, int n, int m, const Grid& grid);

// max over nodes of |LHS of the associated equation| / max term magnitude
double associated_residual(const PolySystem& ps, const AssociatedFunction& af, const Grid& grid);

}  // namespace sip
