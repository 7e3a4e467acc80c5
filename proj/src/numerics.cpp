#include "sip/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace sip {

const char* to_string(MapKind k) {
    switch (k) {
        case MapKind::Finite: return "finite";
        case MapKind::SemiInfinite: return "semi-infinite";
        case MapKind::Infinite: return "infinite";
    }
    return "finite";
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    if (n % 2) x[n / 2] = 0.0;
    return {x, w};
}

namespace {

double softplus(double v) { return v > 30 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); }
double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

struct Map {
    MapKind kind;
    double a, b;
    double x(double v) const {
        if (kind == MapKind::Infinite) return v;
        if (std::isfinite(a)) return a + softplus(v);
        return b - softplus(v);
    }
    double jac(double v) const { return kind == MapKind::Infinite ? 1.0 : sigmoid(v); }
};

}  // namespace

Grid build_grid(const MasterSpec& spec, int npoints, int m) {
    if (!(spec.a < spec.b)) throw Error(ErrorCode::IntervalDegenerate, "a >= b");
    if (npoints < 16) throw Error(ErrorCode::IntervalDegenerate, "npoints must be >= 16");
    Grid g;
    if (std::isfinite(spec.a) && std::isfinite(spec.b)) {
        auto [t, w] = gauss_legendre(npoints);
        const double mid = 0.5 * (spec.a + spec.b), half = 0.5 * (spec.b - spec.a);
        g.map_kind = MapKind::Finite;
        for (int i = 0; i < npoints; ++i) {
            g.nodes.push_back(mid + half * t[i]);
            g.weights.push_back(half * w[i]);
        }
        return g;
    }
    const bool infinite = !std::isfinite(spec.a) && !std::isfinite(spec.b);
    g.map_kind = infinite ? MapKind::Infinite : MapKind::SemiInfinite;
    const Map mp{g.map_kind, spec.a, spec.b};

    const double minus_inf = -std::numeric_limits<double>::infinity();
    auto f = [&](double v) {
        const double x = mp.x(v);
        if (!spec.contains(x)) return minus_inf;
        const double Ax = spec.A_at(x);
        double r = spec.weight.log_value(x) + std::log(mp.jac(v));
        if (m > 0) r += m * std::log(Ax);
        return std::isnan(r) ? minus_inf : r;
    };

    // peak of the log sector weight in v
    double vc = 0.0, best = minus_inf;
    for (double v = -60.0; v <= 60.0; v += 0.125) {
        const double fv = f(v);
        if (fv > best) { best = fv; vc = v; }
    }
    double lo = vc - 0.125, hi = vc + 0.125;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(vc)); ++it) {
        const double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
        if (f(c) > f(d)) hi = d; else lo = c;
    }
    vc = 0.5 * (lo + hi);
    const double fc = f(vc);
    const double hh = 1e-3;
    const double curv = -(f(vc + hh) - 2.0 * fc + f(vc - hh)) / (hh * hh);
    const double L = 1.0 / std::sqrt(std::max(curv, 1e-12));

    // t-range: until the log weight drops by 800 or |t| = 6
    const double drop = 800.0, tmax = 6.0;
    auto edge = [&](double dir) {
        double t = 0.0;
        while (std::abs(t) < tmax) {
            const double tn = t + dir * 0.01;
            const double fv = f(vc + L * std::sinh(tn));
            if (!(fv - fc > -drop)) return tn;
            t = tn;
        }
        return dir * tmax;
    };
    const double t0 = edge(-1.0), t1 = edge(1.0);
    const double h = (t1 - t0) / (npoints - 1);
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < npoints; ++i) {
        const double t = t0 + h * i;
        const double v = vc + L * std::sinh(t);
        const double x = mp.x(v);
        const double w = mp.jac(v) * L * std::cosh(t) * h;
        const double fv = f(v);
        if (!spec.contains(x) || !std::isfinite(w) || !(fv - fc > -drop)) continue;
        pts.emplace_back(x, w);
    }
    std::sort(pts.begin(), pts.end());
    for (auto& [x, w] : pts) {
        if (!g.nodes.empty() && x <= g.nodes.back()) continue;
        g.nodes.push_back(x);
        g.weights.push_back(w);
    }
    return g;
}

double integrate(const Grid& g, const std::function<double(double)>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * f(g.nodes[i]);
    return s;
}

double integrate(const Grid& g, const std::vector<double>& values) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * values[i];
    return s;
}

double solve_fixed_point(const std::function<double(double)>& g, const std::function<double(double)>& dg,
                         double z_init, double tol, int max_iter) {
    double z = z_init;
    for (int it = 0; it < max_iter; ++it) {
        const double r = z - g(z);
        if (std::abs(r) < tol) return z;
        double step = r;
        if (dg) {
            const double d = 1.0 - dg(z);
            if (std::abs(d) > 1e-14) step = r / d;
        }
        double zn = z - step;
        if (!std::isfinite(zn)) zn = g(z);
        z = zn;
    }
    if (std::abs(z - g(z)) < tol) return z;
    throw Error(ErrorCode::NoConvergence, "fixed point after " + std::to_string(max_iter) + " iterations");
}

double solve_lagrange(const MasterSpec& spec, double x, double t, double tol) {
    return solve_fixed_point([&](double z) { return x + t * spec.A_at(z); },
                             [&](double z) { return t * spec.dA_at(z); }, x,
                             tol * std::max(1.0, std::abs(x)));
}

}  // namespace sip
