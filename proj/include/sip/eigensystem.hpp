#pragma once

#include <array>
#include <vector>

#include "sip/master_catalog.hpp"
#include "sip/numerics.hpp"
#include "sip/orthopoly.hpp"

namespace sip {

// psi, dpsi/dx, d2psi/dx2 of the unit-norm basis functions n = m..m+count-1 at one x.
struct BasisValues {
    std::vector<double> f, d1, d2;
};

struct EigenSystem {
    MasterSpec spec;
    int m = 0;
    int max_n = 0;  // highest basis index
    Sector sector;
    Grid grid;
    double log_h0 = 0.0;               // log of integral of W A^m
    std::vector<double> xi;            // xi(x) at the grid nodes
    std::vector<double> potential;     // V_m at the grid nodes
    std::vector<double> energies;      // E(n, m), n = m..max_n
    // psi_n = (-1)^m A^{1/4} W^{1/2} A^{m/2} p_n / N_n with p_n monic
    std::vector<double> log_norms;
    // same relation for the Rodrigues-normalized phi_{n,m} (a_n = 1)
    std::vector<double> rodrigues_log_norms;
    std::vector<int> rodrigues_norm_signs;
    std::vector<std::vector<double>> wavefunctions;  // [n - m][node]

    int count() const { return max_n - m + 1; }
    double energy(int n) const { return energies.at(n - m); }
    BasisValues eval(double x, int count) const;
    // integral of f g dxi as a grid sum
    double inner(const std::vector<double>& f, const std::vector<double>& g) const;
};

// Largest basis index with finite norm in sector m, limited to max_n.
int sector_cap(const MasterSpec& spec, int m, int max_n);

EigenSystem build_eigensystem(const PolySystem& ps, int m, const Grid& grid);
EigenSystem build_eigensystem(const MasterSpec& spec, int m, int max_n, int npoints = kDefaultPoints);

// V_m terms at x, in the order -A1/2, -(2m-1)A''/4, s^2/(4A), (m/2) A' s / A, (4m^2-1) A'^2/(16 A)
std::array<double, 5> potential_terms(const MasterSpec& spec, int m, double x);
double potential_value(const EigenSystem& es, double x);

double schrodinger_residual(const EigenSystem& es, int n);
int node_count(const EigenSystem& es, int n);

}  // namespace sip
