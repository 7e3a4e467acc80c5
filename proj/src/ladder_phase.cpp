#include "sip/ladder_phase.hpp"

#include <algorithm>
#include <cmath>

namespace sip {

double mu_value(const MasterSpec& spec, int n, int m) {
    (void)m;
    const double A2 = spec.A2(), A1 = drift_line(spec).A1;
    return -0.5 * A2 * (n - 1) - (A1 + 0.5 * n * A2);
}

std::array<double, 4> f_coeffs(const Sector& s, int n) {
    const double f1 = -0.5 * s.A2 - 0.5 * s.A1 - 0.25 * s.A2;
    const double f3 = -0.5 * s.C - 0.5 * s.A2 + 0.25 * s.A2;
    return {f1, s.v(n), f3, s.vp(n)};
}

namespace {

std::vector<double> fit_points(const MasterSpec& spec) {
    if (std::isfinite(spec.a) && std::isfinite(spec.b)) {
        std::vector<double> p;
        for (double u : {0.1, 0.3, 0.5, 0.7, 0.9}) p.push_back(spec.a + u * (spec.b - spec.a));
        return p;
    }
    if (std::isfinite(spec.a)) return {spec.a + 0.25, spec.a + 0.5, spec.a + 1.0, spec.a + 2.0, spec.a + 4.0};
    if (std::isfinite(spec.b)) return {spec.b - 4.0, spec.b - 2.0, spec.b - 1.0, spec.b - 0.5, spec.b - 0.25};
    return {-2.0, -1.0, 0.0, 1.0, 2.0};
}

}  // namespace

std::array<double, 3> eta_printed(const MasterSpec& spec, int m, double E) {
    const Sector s(spec, m);
    const double g = spec.gamma_shift, A2 = s.A2, A1 = s.A1, C = s.C;
    const double e = E - g + (2.0 * m - 1.0) / 4.0 * A2;
    const double q = (4.0 * m * m - 1.0) / 16.0;
    const double eta1 = 0.5 * A2 * e + (1.0 - 2.0 * m) / 4.0 * A2 * A1 - 0.25 * A1 - q * A1;
    const double eta2 = s.Ap0 * e + 0.5 * s.Ap0 * A1 - 0.5 * A1 * C - 0.5 * m * (A2 + s.Ap0) * C;
    // the last two terms of eta3 carry no operator between them; read as a product
    const double eta3 = s.A0 * e + 0.5 * s.A0 * A1 - 0.25 * C * C - 0.5 * m * s.Ap0 * C * q * s.Ap0 * s.Ap0;
    return {eta1, eta2, eta3};
}

ClassicalPhase classical_phase(const MasterSpec& spec, int m, double E, double x0, bool fit) {
    ClassicalPhase cp;
    cp.E = E;
    cp.mass = spec.mass;
    cp.x0 = x0;
    cp.fitted = fit;
    if (fit) {
        auto xs = fit_points(spec);
        Eigen::MatrixXd V(xs.size(), 4);
        Eigen::VectorXd y(xs.size());
        double ymax = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double x = xs[i];
            auto t = potential_terms(spec, m, x);
            const double Vm = t[0] + t[1] + t[2] + t[3] + t[4] + spec.gamma_shift;
            y(i) = spec.A_at(x) * (E - Vm);
            for (int k = 0; k < 4; ++k) V(i, k) = std::pow(x, k);
            ymax = std::max(ymax, std::abs(y(i)));
        }
        Eigen::VectorXd c = V.colPivHouseholderQr().solve(y);
        cp.eta3 = c(0);
        cp.eta2 = c(1);
        cp.eta1 = c(2);
        double xmax = 0.0;
        for (double x : xs) xmax = std::max(xmax, std::abs(x));
        cp.cubic_residual = std::abs(c(3)) * xmax * xmax * xmax / std::max(ymax, 1e-300);
    } else {
        auto e = eta_printed(spec, m, E);
        cp.eta1 = e[0];
        cp.eta2 = e[1];
        cp.eta3 = e[2];
    }
    if (!(cp.eta1 < 0.0)) throw Error(ErrorCode::NonOscillatory, "eta1 >= 0 at E=" + std::to_string(E));
    cp.offset = cp.eta2 / (2.0 * cp.eta1);
    const double disc = cp.offset * cp.offset - cp.eta3 / cp.eta1;
    if (!(disc >= 0.0)) throw Error(ErrorCode::NonOscillatory, "negative squared amplitude at E=" + std::to_string(E));
    cp.omega_c = std::sqrt(-2.0 * cp.eta1 / cp.mass);
    cp.amplitude = x0 * std::sqrt(disc);
    return cp;
}

ClassicalPhase classical_phase(const EigenSystem& es, double E, double x0, bool fit) {
    return classical_phase(es.spec, es.m, E, x0, fit);
}

std::array<double, 2> classical_orbit(const ClassicalPhase& cp, double t) {
    return {cp.amplitude * std::sin(cp.omega_c * t), cp.mass * cp.amplitude * cp.omega_c * std::cos(cp.omega_c * t)};
}

int ladder_cap(const MasterSpec& spec, int m) {
    const int top = max_normalizable_n(spec, m);
    // <x> diverges in the top normalizable state
    return top >= kUnbounded ? kUnbounded : top - 1;
}

CMat LadderSet::h_matrix() const {
    CMat h = CMat::Zero(size(), size());
    for (int i = 0; i < size(); ++i) h(i, i) = energies[i];
    return h;
}

LadderSet build_ladder(const EigenSystem& es, int nmax, double x0, double p0) {
    if (!(x0 > 0) || !(p0 > 0)) throw Error(ErrorCode::ParameterRange, "x0, p0 must be positive");
    LadderSet ls;
    ls.spec = es.spec;
    ls.sector = es.sector;
    ls.m = es.m;
    ls.x0 = x0;
    ls.p0 = p0;
    const int cap = std::min(es.max_n, ladder_cap(es.spec, es.m));
    ls.nmax = std::min(nmax, cap);
    ls.clamped = ls.nmax < nmax;
    if (ls.nmax < ls.m + 2) throw Error(ErrorCode::TruncationTooSmall, "need nmax >= m + 2");
    const Sector& s = ls.sector;
    const int N = ls.size(), m = ls.m;

    for (int n = m; n <= ls.nmax; ++n) {
        ls.energies.push_back(s.energy(n));
        ls.f.push_back(f_coeffs(s, n));
        ls.delta.push_back(classical_phase(es.spec, m, s.energy(n), 1.0, true).offset);
        if (n > m) {
            ls.mu.push_back(s.mu(n));
            ls.eps.push_back(s.eps(n));
            ls.e_over_mu.push_back(s.eps(n) / s.mu(n));
        }
    }

    ls.a_tilde = CMat::Zero(N, N);
    ls.b_tilde = CMat::Zero(N, N);
    for (int i = 1; i < N; ++i) {
        const int n = m + i;
        const double rc = std::sqrt(s.c(n));
        ls.b_tilde(i, i - 1) = s.mu(n) * rc;
        ls.a_tilde(i - 1, i) = s.eps(n) / s.mu(n) / rc;
    }

    // Jacobi matrix of x, one size larger for the projected x^2
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int i = 0; i <= N; ++i) {
        J(i, i) = s.b(m + i);
        if (i < N) J(i, i + 1) = J(i + 1, i) = std::sqrt(s.c(m + i + 1));
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i + 1 < N; ++i) {
        const int k = m + i;
        T(i + 1, i) = (0.25 * s.A2 - s.u(k)) * std::sqrt(s.c(k + 1));
        T(i, i + 1) = -T(i + 1, i);
    }
    ls.x_matrix = CMat::Zero(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) ls.x_matrix(i, j) = x0 * (J(i, j) + (i == j ? ls.delta[i] : 0.0));
    ls.p_matrix = cd(0.0, -p0) * T.cast<cd>();
    ls.g_matrix = cd(0.0, -1.0) * (ls.x_matrix * ls.p_matrix - ls.p_matrix * ls.x_matrix);

    const Eigen::MatrixXd J2 = (J * J).topLeftCorner(N, N);
    const Eigen::MatrixXd Aproj = es.spec.a_coeffs[0] * Eigen::MatrixXd::Identity(N, N) +
                                  es.spec.a_coeffs[1] * J.topLeftCorner(N, N) + es.spec.a_coeffs[2] * J2;
    ls.g_exact = (x0 * p0) * Aproj.cast<cd>();
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            ls.g_exact(i, j) += cd(0.0, -x0) * (ls.delta[i] - ls.delta[j]) * ls.p_matrix(i, j);
    return ls;
}

FirstOrderOp op_a_tilde(const Sector& s) {
    return {[](int) { return 1.0; }, [s](int n) { return s.u(n); }, [s](int n) { return s.v(n); }};
}

FirstOrderOp op_b_tilde(const Sector& s) {
    return {[](int) { return -1.0; }, [s](int n) { return s.up(n); }, [s](int n) { return s.vp(n); }};
}

namespace {

// alpha A~ + beta B~ + gamma with column-dependent alpha, beta, gamma
FirstOrderOp combine(const Sector& s, std::function<std::array<double, 3>(int)> k) {
    return {[k](int n) { auto c = k(n); return c[0] - c[1]; },
            [s, k](int n) { auto c = k(n); return c[0] * s.u(n) + c[1] * s.up(n); },
            [s, k](int n) { auto c = k(n); return c[0] * s.v(n) + c[1] * s.vp(n) + c[2]; }};
}

}  // namespace

FirstOrderOp op_a_dagger_printed(const Sector& s) {
    return combine(s, [s](int n) {
        auto [f1, f2, f3, f4] = f_coeffs(s, n);
        const double S = f1 + f3, App = s.A2;
        const double a = (f1 - f3 - App) / S, b = (2 * f1 - App) / S;
        const double c = ((f2 - s.Ap0) * S - (f1 - App) * (f2 + f4) + 0.5 * (f2 - f4) * S - 0.5 * (f1 - f3) * (f2 + f4)) / S;
        return std::array<double, 3>{a, b, c};
    });
}

FirstOrderOp op_b_dagger_printed(const Sector& s) {
    return combine(s, [s](int n) {
        auto [f1, f2, f3, f4] = f_coeffs(s, n);
        const double S = f1 + f3, App = s.A2;
        const double a = (2 * f3 + App) / S, b = (f3 - f1 + App) / S;
        const double c = ((f4 + s.Ap0) * S - (f3 + App) * (f2 + f4) + 0.5 * (f1 - f3) * (f2 + f4) - 0.5 * (f2 - f4) * S) / S;
        return std::array<double, 3>{a, b, c};
    });
}

std::vector<double> apply_on_grid(const EigenSystem& es, const FirstOrderOp& op, int n, int k) {
    std::vector<double> out(es.grid.size());
    const double cdv = op.cd(n), cx = op.cx(n), c0 = op.c0(n);
    for (std::size_t i = 0; i < es.grid.size(); ++i) {
        const double x = es.grid.nodes[i];
        auto bv = es.eval(x, k - es.m + 1);
        const int j = k - es.m;
        out[i] = cdv * es.spec.A_at(x) * bv.d1[j] + (cx * x + c0) * bv.f[j];
    }
    return out;
}

CMat grid_matrix(const EigenSystem& es, const FirstOrderOp& op, int count) {
    const std::size_t G = es.grid.size();
    std::vector<std::vector<double>> f(count, std::vector<double>(G)), d(count, std::vector<double>(G));
    for (std::size_t i = 0; i < G; ++i) {
        auto bv = es.eval(es.grid.nodes[i], count);
        for (int k = 0; k < count; ++k) {
            f[k][i] = bv.f[k];
            d[k][i] = bv.d1[k];
        }
    }
    CMat M = CMat::Zero(count, count);
    for (int j = 0; j < count; ++j) {
        const int n = es.m + j;
        const double cdv = op.cd(n), cx = op.cx(n), c0 = op.c0(n);
        std::vector<double> col(G);
        for (std::size_t i = 0; i < G; ++i) {
            const double x = es.grid.nodes[i];
            col[i] = cdv * es.spec.A_at(x) * d[j][i] + (cx * x + c0) * f[j][i];
        }
        for (int i = 0; i < count; ++i) M(i, j) = es.inner(f[i], col);
    }
    return M;
}

double max_abs(const CMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double inner_block_diff(const CMat& a, const CMat& b, int trim) {
    const int n = static_cast<int>(std::min(a.rows(), b.rows())) - trim;
    if (n <= 0) return 0.0;
    return max_abs(a.topLeftCorner(n, n) - b.topLeftCorner(n, n));
}

PrintedForms printed_forms(const LadderSet& ls, const EigenSystem& es) {
    PrintedForms pf;
    const int N = ls.size();
    const Sector& s = ls.sector;
    const CMat A = grid_matrix(es, op_a_tilde(s), N);
    const CMat B = grid_matrix(es, op_b_tilde(s), N);
    pf.a_dagger = grid_matrix(es, op_a_dagger_printed(s), N);
    pf.b_dagger = grid_matrix(es, op_b_dagger_printed(s), N);
    pf.x_ladder = ls.x0 * (A + pf.a_dagger + B + pf.b_dagger);
    pf.p_ladder = (ls.p0 / cd(0.0, 2.0)) * (A + pf.b_dagger - pf.a_dagger - B);
    const double p0 = ls.p0, x0 = ls.x0;
    const double Ap0 = s.Ap0, A2 = s.A2;
    FirstOrderOp sym{[](int) { return 1.0; }, [A2](int) { return 0.5 * A2; }, [Ap0](int) { return 0.5 * Ap0; }};
    FirstOrderOp herm{[](int) { return 1.0; }, [A2](int) { return 0.25 * A2; }, [Ap0](int) { return 0.25 * Ap0; }};
    FirstOrderOp xm{[](int) { return 0.0; }, [x0](int) { return x0; }, [](int) { return 0.0; }};
    pf.p_printed_sym = cd(0.0, -p0) * grid_matrix(es, sym, N);
    pf.p_hermitian = cd(0.0, -p0) * grid_matrix(es, herm, N);
    pf.x_mult = grid_matrix(es, xm, N);

    const int trim = 2;
    pf.a_dagger_defect = inner_block_diff(pf.a_dagger, ls.a_tilde.adjoint(), trim);
    pf.b_dagger_defect = inner_block_diff(pf.b_dagger, ls.b_tilde.adjoint(), trim);
    pf.x_ladder_defect = inner_block_diff(pf.x_ladder, ls.x_matrix, trim);
    pf.p_ladder_defect = inner_block_diff(pf.p_ladder, ls.p_matrix, trim);
    pf.p_printed_defect = inner_block_diff(pf.p_printed_sym, ls.p_matrix, trim);
    pf.p_hermitian_defect = inner_block_diff(pf.p_hermitian, ls.p_matrix, trim);
    CMat xd = ls.x_matrix;
    for (int i = 0; i < N; ++i) xd(i, i) -= x0 * ls.delta[i];
    pf.x_mult_defect = inner_block_diff(pf.x_mult, xd, trim);
    return pf;
}

}  // namespace sip
