#include "sip/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace sip {

double b1_value(const Sector& s, double E) {
    const double a2 = s.A2, a1 = s.A1, m = s.m;
    return a2 * (E - s.gamma + (2 * m - 1) / 4.0 * a2) + (1 - 2 * m) / 2.0 * a2 * a1 - 0.5 * a1 * a1 -
           (4 * m * m - 1) / 8.0 * a2;
}

EvolutionSet build_evolution(const LadderSet& ls, const EigenSystem& es) {
    if (es.m != ls.m || es.count() < ls.size())
        throw Error(ErrorCode::BasisMismatch, "ladder and eigensystem truncations differ");
    EvolutionSet ev;
    ev.m = ls.m;
    ev.mass = ls.spec.mass;
    ev.b0 = -ls.sector.A2 / (2.0 * ev.mass) + 0.0;
    ev.omega0 = ev.b0 / 2.0;
    ev.energies = ls.energies;
    ev.x = ls.x_matrix;
    ev.p = ls.p_matrix;
    for (double E : ev.energies) {
        const double b1 = b1_value(ls.sector, E);
        const cd wh = std::sqrt(cd(ev.b0 * ev.b0 - 4.0 * b1 / ev.mass)) / 2.0;
        ev.b1_diag.push_back(b1);
        ev.omegaH_diag.push_back(wh);
        ev.r_plus.push_back(ev.omega0 + wh);
        ev.r_minus.push_back(ev.omega0 - wh);
    }
    return ev;
}

namespace {

// sin(w t)/w with the w -> 0 limit
cd sinc_t(cd w, double t) { return std::abs(w) < 1e-300 ? cd(t) : std::sin(w * t) / w; }

CMat right_diag(const CMat& a, const std::vector<cd>& d) {
    CMat out = a;
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.col(j) *= d[j];
    return out;
}

}  // namespace

CMat heisenberg_xt(const EvolutionSet& ev, double t) {
    const int N = ev.size();
    std::vector<cd> d1(N), d2(N);
    const cd ph = std::exp(cd(0.0, ev.omega0 * t));
    for (int j = 0; j < N; ++j) {
        const cd w = ev.omegaH_diag[j];
        d1[j] = ph * (std::cos(w * t) - cd(0.0, 1.0) * ev.omega0 * sinc_t(w, t));
        d2[j] = ph * 2.0 * ev.omega0 * sinc_t(w, t);
    }
    return right_diag(ev.x, d1) + right_diag(ev.p, d2);
}

CMat heisenberg_pt(const EvolutionSet& ev, double t) {
    const int N = ev.size();
    std::vector<cd> d1(N), d2(N);
    const cd ph = std::exp(cd(0.0, ev.omega0 * t));
    for (int j = 0; j < N; ++j) {
        const cd w = ev.omegaH_diag[j];
        d1[j] = ph * (std::cos(w * t) + cd(0.0, 1.0) * ev.omega0 * sinc_t(w, t));
        d2[j] = ph * 2.0 * ev.omega0 * sinc_t(w, t);
    }
    return right_diag(ev.p, d1) + right_diag(ev.x, d2);
}

CMat conjugate(const CMat& op, const std::vector<double>& energies, double t) {
    CMat out = op;
    for (Eigen::Index i = 0; i < op.rows(); ++i)
        for (Eigen::Index j = 0; j < op.cols(); ++j) out(i, j) *= std::exp(cd(0.0, (energies[i] - energies[j]) * t));
    return out;
}

std::pair<CMat, CMat> evolution_oracle(const EvolutionSet& ev, double t) {
    return {conjugate(ev.x, ev.energies, t), conjugate(ev.p, ev.energies, t)};
}

SeriesResult heisenberg_series(const EvolutionSet& ev, double t, int max_terms) {
    const int N = ev.size();
    const cd I(0.0, 1.0);
    std::vector<cd> f(N, 1.0), g(N, 0.0);
    SeriesResult res;
    res.x = CMat::Zero(N, N);
    cd coef = 1.0;
    for (int n = 0; n < max_terms; ++n) {
        const CMat term = coef * (right_diag(ev.x, f) + right_diag(ev.p, g));
        res.x += term;
        res.terms = n + 1;
        if (n > 2 && term.norm() <= 1e-16 * res.x.norm()) {
            res.converged = true;
            break;
        }
        std::vector<cd> fn(N), gn(N);
        for (int j = 0; j < N; ++j) {
            fn[j] = -I * ev.b1_diag[j] * g[j];
            gn[j] = -I * (f[j] / ev.mass + I * ev.b0 * g[j]);
        }
        f.swap(fn);
        g.swap(gn);
        coef *= I * t / double(n + 1);
    }
    return res;
}

double g_closed_defect(const EvolutionSet& ev, int n_max) {
    const cd I(0.0, 1.0);
    double worst = 0.0;
    for (int j = 0; j < ev.size(); ++j) {
        const cd w = ev.omegaH_diag[j];
        if (std::abs(w) < 1e-300) continue;
        const cd A = -I / (2.0 * ev.mass * w);
        cd f = 1.0, g = 0.0;
        for (int n = 1; n <= n_max; ++n) {
            const cd fn = -I * ev.b1_diag[j] * g;
            const cd gn = -I * (f / ev.mass + I * ev.b0 * g);
            f = fn;
            g = gn;
            const cd closed = A * (std::pow(ev.r_plus[j], n) - std::pow(ev.r_minus[j], n));
            const double scale = std::max(std::abs(g), std::abs(closed));
            if (scale > 0) worst = std::max(worst, std::abs(g - closed) / scale);
        }
    }
    return worst;
}

double frobenius_block(const CMat& a, const CMat& b, int trim) {
    const Eigen::Index n = std::max<Eigen::Index>(1, std::min(a.rows(), b.rows()) - trim);
    return (a.topLeftCorner(n, n) - b.topLeftCorner(n, n)).norm();
}

namespace {

Eigen::VectorXd hermitian_eigenvalues(const CMat& a) {
    // real symmetric embedding [[Re, -Im], [Im, Re]] doubles each eigenvalue
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd big(2 * n, 2 * n);
    big << a.real(), -a.imag(), a.imag(), a.real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(big, Eigen::EigenvaluesOnly);
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = es.eigenvalues()(2 * i);
    return out;
}

}  // namespace

DynamicsChecks dynamics_checks(const EvolutionSet& ev, double t, double h) {
    DynamicsChecks c;
    const int N = ev.size();
    const cd I(0.0, 1.0);
    Eigen::VectorXcd E(N);
    for (int i = 0; i < N; ++i) E(i) = ev.energies[i];
    const CMat H = E.asDiagonal();
    auto [xp, pp] = evolution_oracle(ev, h);
    auto [xm, pm] = evolution_oracle(ev, -h);
    const CMat dx = (xp - xm) / (2.0 * h), dp = (pp - pm) / (2.0 * h);
    const CMat cx = I * (H * ev.x - ev.x * H), cp = I * (H * ev.p - ev.p * H);
    c.heisenberg_x = (dx - cx).norm() / std::max(1e-300, cx.norm());
    c.heisenberg_p = (dp - cp).norm() / std::max(1e-300, cp.norm());

    auto [xt, pt] = evolution_oracle(ev, t);
    c.hermiticity = (xt - xt.adjoint()).norm() / ev.x.norm();
    const Eigen::VectorXd e0 = hermitian_eigenvalues(ev.x), e1 = hermitian_eigenvalues(xt);
    c.spectrum_shift = (e0 - e1).cwiseAbs().maxCoeff() / std::max(1e-300, e0.cwiseAbs().maxCoeff());

    const CMat xclosed = heisenberg_xt(ev, t), pclosed = heisenberg_pt(ev, t);
    c.closed_x = frobenius_block(xt, xclosed);
    c.closed_p = frobenius_block(pt, pclosed);
    c.series_vs_closed = frobenius_block(heisenberg_series(ev, t).x, xclosed);
    return c;
}

Moments state_moments(const EvolutionSet& ev, const CVec& a, double t, bool closed_form) {
    const Eigen::Index n = a.size();
    if (n > ev.size()) throw Error(ErrorCode::BasisMismatch, "state longer than evolution basis");
    CMat X, P;
    if (closed_form) {
        X = heisenberg_xt(ev, t);
        P = heisenberg_pt(ev, t);
    } else {
        std::tie(X, P) = evolution_oracle(ev, t);
    }
    X = X.topLeftCorner(n, n).eval();
    P = P.topLeftCorner(n, n).eval();
    const double nn = a.squaredNorm();
    Moments mo;
    mo.mean_x = a.dot(X * a) / nn;
    mo.mean_p = a.dot(P * a) / nn;
    mo.dx = std::sqrt(std::max(0.0, (X * a).squaredNorm() / nn - std::norm(mo.mean_x)));
    mo.dp = std::sqrt(std::max(0.0, (P * a).squaredNorm() / nn - std::norm(mo.mean_p)));
    return mo;
}

}  // namespace sip
