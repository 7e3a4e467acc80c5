#include "sip/orthopoly.hpp"

#include <cmath>
#include <limits>

namespace sip {

Sector::Sector(const MasterSpec& spec, int m_) : m(m_) {
    auto d = drift_line(spec);
    C = d.C;
    A1 = d.A1;
    A0 = spec.a_coeffs[0];
    Ap0 = spec.a_coeffs[1];
    A2 = spec.A2();
    gamma = spec.gamma_shift;
}

double Sector::eps(int n) const {
    if (n == m) return 0.0;
    const double num = A1 * C + n * n * A2 * Ap0 + (2 * n - m) * A1 * Ap0 + m * A2 * C;
    const double den = A1 + n * A2;
    return num * num / (4 * den * den) - 0.25 * C * C - (n - m) * A1 * A0 - 0.25 * m * m * Ap0 * Ap0 -
           0.5 * m * Ap0 * C - 0.5 * (double(n) * n - double(m) * m) * A2 * A0;
}

double Sector::v(int k) const {
    const double cA = (k * k * A2 * Ap0 + (2 * k - m) * A1 * Ap0 + (m - k) * A2 * C) / (2 * (A1 + k * A2));
    return -0.25 * Ap0 - 0.5 * C - cA;
}

double Sector::vp(int k) const {
    const double cB =
        (2 * A1 * C + k * k * A2 * Ap0 + (2 * k - m) * A1 * Ap0 + (m + k) * A2 * C) / (2 * (A1 + k * A2));
    return 0.25 * Ap0 + 0.5 * C - cB;
}

double Sector::log_lead(int n, int* sign) const {
    const double c2 = 0.5 * A2;
    double l = 0.0;
    int s = 1;
    for (int j = 0; j < n; ++j) {
        const double f = A1 + (n + j + 1) * c2;
        if (f < 0) s = -s;
        l += std::log(std::abs(f));
    }
    *sign = s;
    return l;
}

double gamma_n(const MasterSpec& spec, int n) {
    const auto d = drift_line(spec);
    return -n * (spec.A2() + d.A1) - 0.5 * n * (n - 1) * spec.A2();
}

Poly rodrigues(const MasterSpec& spec, int n) {
    // (d/dx)^k (A^n W) = A^{n-k} W p_k with p_{k+1} = ((n-k) A' + s) p_k + A p_k'
    const auto d = drift_line(spec);
    const Poly A = spec.A();
    const Poly dA = A.derivative();
    const Poly s({d.C, d.A1});
    Poly p = Poly::constant(1.0);
    for (int k = 0; k < n; ++k) p = (double(n - k) * dA + s) * p + A * p.derivative();
    return p;
}

PolySystem build_polys(const MasterSpec& spec, int max_n, int npoints) {
    require_valid(spec);
    if (max_n < 0) throw Error(ErrorCode::BadQuantumNumbers, "max_n < 0");
    PolySystem ps;
    ps.spec = spec;
    ps.requested_n = max_n;
    const int cap = max_normalizable_n(spec, 0);
    if (cap < 0) throw Error(ErrorCode::NormDiverges, "no normalizable polynomial");
    ps.max_n = std::min(max_n, cap);
    ps.truncated = ps.max_n < max_n;
    const Grid g = build_grid(spec, npoints, 0);
    for (int n = 0; n <= ps.max_n; ++n) {
        Poly p = rodrigues(spec, n);
        if (p.degree() != n) throw Error(ErrorCode::DegreeViolation, "phi_" + std::to_string(n) + " lost degree");
        double h = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = g.nodes[i], v = p(x);
            h += g.weights[i] * std::exp(spec.weight.log_value(x)) * v * v;
        }
        if (!std::isfinite(h)) throw Error(ErrorCode::NormDiverges, "h_" + std::to_string(n));
        ps.polys.push_back(std::move(p));
        ps.rodrigues_norm.push_back(1.0);
        ps.gammas.push_back(gamma_n(spec, n));
        ps.norms.push_back(h);
    }
    return ps;
}

double eigen_residual(const PolySystem& ps, int n, const Grid& grid) {
    const Poly& p = ps.polys.at(n);
    const Poly d1 = p.derivative(), d2 = p.derivative(2);
    const double g = ps.gammas.at(n);
    double num = 0.0, den = 0.0;
    for (double x : grid.nodes) {
        // (1/W)(A W p')' = A p'' + (A' + s) p'
        const double s = drift_at(ps.spec, x);
        const double lhs = ps.spec.A_at(x) * d2(x) + (ps.spec.dA_at(x) + s) * d1(x);
        num = std::max(num, std::abs(lhs + g * p(x)));
        den = std::max(den, std::abs(g * p(x)));
    }
    if (num == 0.0) return 0.0;
    return den > 0.0 ? num / den : num;
}

AssociatedFunction associated(const PolySystem& ps, int n, int m, const Grid& grid) {
    if (m < 0 || m > n) throw Error(ErrorCode::BadQuantumNumbers, "need 0 <= m <= n");
    if (n > ps.max_n) throw Error(ErrorCode::BadQuantumNumbers, "n > max_n");
    AssociatedFunction af;
    af.n = n;
    af.m = m;
    af.deriv = ps.polys[n].derivative(m);
    const double sg = m % 2 ? -1.0 : 1.0;
    for (double x : grid.nodes) af.values.push_back(sg * std::pow(ps.spec.A_at(x), 0.5 * m) * af.deriv(x));
    return af;
}

double associated_residual(const PolySystem& ps, const AssociatedFunction& af, const Grid& grid) {
    const auto& sp = ps.spec;
    const auto d = drift_line(sp);
    const int n = af.n, m = af.m;
    const Poly D = af.deriv, D1 = D.derivative(), D2 = D.derivative(2);
    const double sg = m % 2 ? -1.0 : 1.0;
    const double hm = 0.5 * m;
    double num = 0.0, den = 0.0;
    for (double x : grid.nodes) {
        const double A = sp.A_at(x), Ap = sp.dA_at(x), App = sp.A2();
        const double s = d.C + d.A1 * x;
        const double Dv = D(x), D1v = D1(x), D2v = D2(x);
        const double Am = std::pow(A, hm);
        const double phi = sg * Am * Dv;
        const double phi1 = sg * (hm * Am / A * Ap * Dv + Am * D1v);
        const double phi2 = sg * (hm * (hm - 1) * Am / (A * A) * Ap * Ap * Dv + hm * Am / A * App * Dv +
                                  m * Am / A * Ap * D1v + Am * D2v);
        const double bracket = -0.5 * (double(n) * n + n - double(m) * m) * App + (m - n) * d.A1 -
                               0.25 * m * m * Ap * Ap / A - hm * Ap * s / A;
        const double t1 = A * phi2, t2 = (Ap + s) * phi1, t3 = bracket * phi;
        num = std::max(num, std::abs(t1 + t2 + t3));
        den = std::max({den, std::abs(t1), std::abs(t2), std::abs(t3)});
    }
    if (num == 0.0) return 0.0;
    return den > 0.0 ? num / den : num;
}

}  // namespace sip
