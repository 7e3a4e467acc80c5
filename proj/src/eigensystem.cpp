#include "sip/eigensystem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sip {

int sector_cap(const MasterSpec& spec, int m, int max_n) {
    return std::min(max_n, max_normalizable_n(spec, m));
}

BasisValues EigenSystem::eval(double x, int cnt) const {
    BasisValues out;
    out.f.resize(cnt);
    out.d1.resize(cnt);
    out.d2.resize(cnt);
    const double A = spec.A_at(x), Ap = spec.dA_at(x), s = drift_at(spec, x);
    const double a = 0.25 + 0.5 * m;
    const double L = a * std::log(A) + 0.5 * spec.weight.log_value(x);
    const double L1 = a * Ap / A + 0.5 * s / A;
    const double L2 = a * (sector.A2 * A - Ap * Ap) / (A * A) + 0.5 * (sector.A1 * A - s * Ap) / (A * A);
    const double sg = m % 2 ? -1.0 : 1.0;

    // orthonormal recurrence with a running log scale
    double q = std::exp(-0.5 * log_h0), q1 = 0.0, q2 = 0.0;
    double qm = 0.0, qm1 = 0.0, qm2 = 0.0;
    double log_scale = 0.0;
    for (int i = 0; i < cnt; ++i) {
        const int k = m + i;
        const double e = sg * std::exp(L + log_scale);
        out.f[i] = e * q;
        out.d1[i] = e * (L1 * q + q1);
        out.d2[i] = e * ((L2 + L1 * L1) * q + 2.0 * L1 * q1 + q2);
        if (i + 1 == cnt) break;
        const double bk = sector.b(k);
        const double cn = std::sqrt(sector.c(k + 1));
        const double cp = i > 0 ? std::sqrt(sector.c(k)) : 0.0;
        const double nq = ((x - bk) * q - cp * qm) / cn;
        const double nq1 = ((x - bk) * q1 + q - cp * qm1) / cn;
        const double nq2 = ((x - bk) * q2 + 2.0 * q1 - cp * qm2) / cn;
        qm = q; qm1 = q1; qm2 = q2;
        q = nq; q1 = nq1; q2 = nq2;
        const double big = std::max({std::abs(q), std::abs(q1), std::abs(q2)});
        if (big > 1e100) {
            for (double* p : {&q, &q1, &q2, &qm, &qm1, &qm2}) *p *= 1e-100;
            log_scale += 100.0 * std::log(10.0);
        }
    }
    return out;
}

double EigenSystem::inner(const std::vector<double>& f, const std::vector<double>& g) const {
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        s += grid.weights[i] * f[i] * g[i] / std::sqrt(spec.A_at(grid.nodes[i]));
    return s;
}

std::array<double, 5> potential_terms(const MasterSpec& spec, int m, double x) {
    const auto d = drift_line(spec);
    const double A = spec.A_at(x), Ap = spec.dA_at(x), s = d.C + d.A1 * x;
    return {-0.5 * d.A1, -(2.0 * m - 1.0) / 4.0 * spec.A2(), s * s / (4.0 * A), 0.5 * m * Ap * s / A,
            (4.0 * m * m - 1.0) / 16.0 * Ap * Ap / A};
}

double potential_value(const EigenSystem& es, double x) {
    if (!es.spec.contains(x)) throw Error(ErrorCode::OutOfInterval, "x=" + std::to_string(x));
    auto t = potential_terms(es.spec, es.m, x);
    return t[0] + t[1] + t[2] + t[3] + t[4] + es.spec.gamma_shift;
}

EigenSystem build_eigensystem(const PolySystem& ps, int m, const Grid& grid) {
    if (m < 0 || m > ps.max_n) throw Error(ErrorCode::BadQuantumNumbers, "m outside 0..max_n");
    EigenSystem es;
    es.spec = ps.spec;
    es.m = m;
    es.max_n = sector_cap(ps.spec, m, ps.max_n);
    if (es.max_n < m) throw Error(ErrorCode::NormDiverges, "sector " + std::to_string(m) + " has no states");
    es.sector = Sector(ps.spec, m);
    es.grid = grid;

    std::vector<double> lw;
    for (double x : grid.nodes) {
        const double A = es.spec.A_at(x);
        if (!(A > 0)) throw Error(ErrorCode::MapNotMonotone, "A <= 0 on grid");
        lw.push_back(es.spec.weight.log_value(x) + m * std::log(A));
    }
    const double top = *std::max_element(lw.begin(), lw.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < lw.size(); ++i) acc += grid.weights[i] * std::exp(lw[i] - top);
    es.log_h0 = top + std::log(acc);

    const int cnt = es.count();
    for (int n = m; n <= es.max_n; ++n) {
        es.energies.push_back(es.sector.energy(n));
        double lh = es.log_h0;
        for (int j = m + 1; j <= n; ++j) lh += std::log(es.sector.c(j));
        es.log_norms.push_back(0.5 * lh);
        // leading coefficient of (d/dx)^m phi_n
        int sg;
        const double l = es.sector.log_lead(n, &sg) + std::lgamma(n + 1.0) - std::lgamma(n - m + 1.0);
        es.rodrigues_log_norms.push_back(l + 0.5 * lh);
        es.rodrigues_norm_signs.push_back(sg);
    }
    es.wavefunctions.assign(cnt, std::vector<double>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.nodes[i];
        es.xi.push_back(coordinate_map(es.spec, x));
        es.potential.push_back(potential_value(es, x));
        auto bv = es.eval(x, cnt);
        for (int k = 0; k < cnt; ++k) es.wavefunctions[k][i] = bv.f[k];
    }
    return es;
}

EigenSystem build_eigensystem(const MasterSpec& spec, int m, int max_n, int npoints) {
    require_valid(spec);
    const int cap = sector_cap(spec, m, max_n);
    if (cap < m) throw Error(ErrorCode::NormDiverges, "sector " + std::to_string(m) + " has no states");
    PolySystem ps;
    ps.spec = spec;
    ps.max_n = cap;
    ps.requested_n = max_n;
    ps.truncated = cap < max_n;
    return build_eigensystem(ps, m, build_grid(spec, npoints, m));
}

double schrodinger_residual(const EigenSystem& es, int n) {
    const int k = n - es.m;
    if (k < 0 || k >= es.count()) throw Error(ErrorCode::BadQuantumNumbers, "n outside basis");
    const double E = es.energy(n);
    std::vector<double> r(es.grid.size()), e(es.grid.size());
    for (std::size_t i = 0; i < es.grid.size(); ++i) {
        const double x = es.grid.nodes[i];
        auto bv = es.eval(x, k + 1);
        const double A = es.spec.A_at(x), Ap = es.spec.dA_at(x);
        const double psi_xixi = A * bv.d2[k] + 0.5 * Ap * bv.d1[k];
        r[i] = -psi_xixi + (es.potential[i] - E) * bv.f[k];
        e[i] = E * bv.f[k];
    }
    return std::sqrt(es.inner(r, r) / es.inner(e, e));
}

int node_count(const EigenSystem& es, int n) {
    const auto& f = es.wavefunctions.at(n - es.m);
    double peak = 0.0;
    for (double v : f) peak = std::max(peak, std::abs(v));
    int changes = 0, last = 0;
    for (double v : f) {
        if (std::abs(v) < 1e-12 * peak) continue;
        const int s = v > 0 ? 1 : -1;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

}  // namespace sip
