#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sip/master_catalog.hpp"

namespace sip {

enum class MapKind { Finite, SemiInfinite, Infinite };

const char* to_string(MapKind k);

struct Grid {
    std::vector<double> nodes;
    std::vector<double> weights;
    MapKind map_kind = MapKind::Finite;

    std::size_t size() const { return nodes.size(); }
};

constexpr int kDefaultPoints = 200;

// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

// Quadrature grid for integrals against the sector weight W A^m on (a, b).
// Finite intervals use Gauss-Legendre; otherwise a sinh map centred on the
// peak of W A^m (after a softplus map for half-lines).
Grid build_grid(const MasterSpec& spec, int npoints = kDefaultPoints, int m = 0);

double integrate(const Grid& g, const std::function<double(double)>& f);
double integrate(const Grid& g, const std::vector<double>& values);

// z = g(z). Newton when dg is given and behaves, plain iteration otherwise.
double solve_fixed_point(const std::function<double(double)>& g, const std::function<double(double)>& dg,
                         double z_init, double tol, int max_iter = 100);

// z = x + t A(z) on the branch through z = x at t = 0.
double solve_lagrange(const MasterSpec& spec, double x, double t, double tol = 1e-14);

}  // namespace sip
