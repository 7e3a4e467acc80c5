#include "sip/coherent_states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace sip {

const char* to_string(StateKind k) {
    switch (k) {
        case StateKind::MUCS: return "MUCS";
        case StateKind::AOCS: return "AOCS";
        case StateKind::Custom: return "custom";
    }
    return "custom";
}

double tail_mass(const CVec& a) {
    const Eigen::Index n = a.size();
    if (n == 0) return 0.0;
    const Eigen::Index k = std::max<Eigen::Index>(1, (n + 9) / 10);
    const double total = a.squaredNorm();
    return total > 0 ? a.tail(k).squaredNorm() / total : 0.0;
}

void normalize(StateExpansion& st) {
    const double nrm = st.coeffs.norm();
    if (!(nrm > 0) || !std::isfinite(nrm))
        throw Error(ErrorCode::DivergentRecursion, "coefficients not normalizable");
    st.coeffs /= nrm;
    st.tail_mass = tail_mass(st.coeffs);
    st.converged = st.tail_mass < kTailLimit;
}

double balanced_ratio(const LadderSet& ls) {
    const auto& s = ls.sector;
    return -2.0 * ls.x0 / (ls.p0 * (s.A1 + (ls.m + 1) * s.A2));
}

namespace {

int basis_size(const LadderSet& ls, int n_trunc) {
    if (n_trunc < 1) throw Error(ErrorCode::TruncationTooSmall, "n_trunc must be >= 1");
    if (n_trunc > kHardCap) throw Error(ErrorCode::TruncationTooSmall, "n_trunc above hard cap 512");
    return std::min(n_trunc + 1, ls.size());
}

StateExpansion make_state(const LadderSet& ls, StateKind kind, CVec a) {
    StateExpansion st;
    st.kind = kind;
    st.spec = ls.spec;
    st.m = ls.m;
    st.n_trunc = static_cast<int>(a.size()) - 1;
    st.coeffs = std::move(a);
    for (Eigen::Index i = 0; i < st.coeffs.size(); ++i)
        if (!std::isfinite(std::abs(st.coeffs(i))))
            throw Error(ErrorCode::DivergentRecursion, "coefficient overflow at j=" + std::to_string(ls.m + i));
    normalize(st);
    return st;
}

CMat k_matrix(const LadderSet& ls, double r) { return ls.x_matrix + cd(0.0, r) * ls.p_matrix; }

CVec exact_recursion(const LadderSet& ls, double r, cd C, cd seed0, cd seed1, bool lower_active, int N) {
    const CMat K = k_matrix(ls, r);
    CVec a = CVec::Zero(N);
    a(0) = seed0;
    int start = 0;
    if (lower_active && N > 1) {
        a(1) = seed1;
        start = 1;
    }
    for (int k = start; k + 1 < N; ++k) {
        const cd den = K(k, k + 1);
        if (std::abs(den) < 1e-300) throw Error(ErrorCode::ZeroDenominator, "K(k,k+1) = 0 at k=" + std::to_string(ls.m + k));
        const cd prev = k > 0 ? K(k, k - 1) * a(k - 1) : cd(0.0);
        a(k + 1) = ((C - K(k, k)) * a(k) - prev) / den;
    }
    return a;
}

CVec printed_recursion(const LadderSet& ls, double r, cd C, cd seed0, int N) {
    // coefficients over the monic (unnormalized) functions, converted at the end
    const Sector& s = ls.sector;
    const double x0 = ls.x0, q = 0.5 * r * ls.p0;
    std::vector<cd> a(N, 0.0);
    a[0] = seed0;
    for (int i = 0; i + 1 < N; ++i) {
        const int k = ls.m + i;
        auto [f1, f2, f3, f4] = f_coeffs(s, k);
        const double S = f1 + f3;
        if (S == 0.0) throw Error(ErrorCode::ZeroDenominator, "f1 + f3 = 0");
        const double pre = 2.0 * x0 + q * (4.0 * f3 + 2.0 * s.A2) / S;
        if (pre == 0.0) throw Error(ErrorCode::ZeroDenominator, "prefactor of the recursion vanishes");
        const double g = (2.0 * S * (f4 - f2) + 2.0 * (f2 + f4) * (f1 - f3) + 2.0 * s.Ap0 * S - 2.0 * s.A2 * (f2 + f4)) / S;
        const double lower = 2.0 * x0 - q * (4.0 * f1 - 2.0 * s.A2) / S;
        const cd prev = i > 0 ? lower * s.mu(k) * a[i - 1] : cd(0.0);
        a[i + 1] = (1.0 / pre) * (s.mu(k + 1) / s.eps(k + 1)) * ((C - q * g) * a[i] - prev);
    }
    // psi_raw = N_k psi_hat with N_k = sqrt(h0 prod c)
    CVec out(N);
    double ln = 0.0;
    for (int i = 0; i < N; ++i) {
        if (i > 0) ln += 0.5 * std::log(s.c(ls.m + i));
        out(i) = a[i] * std::exp(ln);
    }
    return out;
}

}  // namespace

StateExpansion mucs_recursion(const LadderSet& ls, const MucsParams& p, int n_trunc, RecursionMode mode) {
    const int N = basis_size(ls, n_trunc);
    double r = p.r;
    const CMat K = k_matrix(ls, r);
    cd C = p.C ? *p.C : K(0, 0) + r * ls.p0 * p.k0;
    // the lower coupling K(m+1, m) vanishes for every r only when it is identically zero
    const bool lower_active = std::abs(p.seed1) > 0.0;

    auto build = [&](double rr, cd CC) {
        CVec a = mode == RecursionMode::Exact ? exact_recursion(ls, rr, CC, p.seed0, p.seed1, lower_active, N)
                                              : printed_recursion(ls, rr, CC, p.seed0, N);
        return make_state(ls, StateKind::MUCS, std::move(a));
    };
    StateExpansion st = build(r, C);
    int it = 0;
    if (p.self_consistent) {
        for (; it < p.max_iter; ++it) {
            auto au = uncertainty_audit(ls, st);
            const double rn = 0.5 * (r + au.r_sc);
            const cd Cn = 0.5 * (C + au.C_sc);
            const bool done = std::abs(rn - r) < 1e-13 * std::max(1.0, std::abs(r)) &&
                              std::abs(Cn - C) < 1e-13 * std::max(1.0, std::abs(C));
            r = rn;
            C = Cn;
            st = build(r, C);
            if (done) break;
        }
    }
    st.iterations = it;
    st.params["x0"] = ls.x0;
    st.params["p0"] = ls.p0;
    st.params["r"] = r;
    st.params["C"] = C;
    st.params["k0"] = (C - k_matrix(ls, r)(0, 0)) / (r * ls.p0);
    st.params["g"] = 0.5 * (ls.sector.A2 - 2.0 * ls.sector.u(ls.m));
    return st;
}

StateExpansion mucs_two_term(const LadderSet& ls, cd k0, int n_trunc) {
    const int N = basis_size(ls, n_trunc);
    const Sector& s = ls.sector;
    CVec a(N);
    // log-space product k0^n prod mu_j/eps_j, times the norm ratio sqrt(c_j)
    double lmag = 0.0, ph = 0.0;
    a(0) = 1.0;
    for (int i = 1; i < N; ++i) {
        const int j = ls.m + i;
        const double e = s.eps(j);
        if (e == 0.0) throw Error(ErrorCode::ZeroEnergyDivision, "eps(" + std::to_string(j) + ") = 0");
        const double ratio = s.mu(j) / e * std::sqrt(s.c(j));
        if (k0 == cd(0.0)) {
            a(i) = 0.0;
            continue;
        }
        lmag += std::log(std::abs(k0)) + std::log(std::abs(ratio));
        ph += std::arg(k0) + (ratio < 0 ? M_PI : 0.0);
        a(i) = std::polar(std::exp(lmag), ph);
    }
    auto st = make_state(ls, StateKind::MUCS, std::move(a));
    st.params["k0"] = k0;
    st.params["x0"] = ls.x0;
    st.params["p0"] = ls.p0;
    return st;
}

bool is_symmetric(const MasterSpec& spec) {
    if (spec.a_coeffs[1] != 0.0) return false;
    if (!(spec.a == -spec.b)) return false;
    for (double x : {0.1, 0.37, 0.5, 0.83}) {
        const double y = std::isfinite(spec.b) ? x * spec.b : 3.0 * x;
        const double l = spec.weight.log_value(y), r = spec.weight.log_value(-y);
        if (std::abs(l - r) > 1e-12 * std::max(1.0, std::abs(l))) return false;
    }
    return true;
}

StateExpansion mucs_parity(const LadderSet& ls, double r, Parity parity, int n_trunc) {
    if (!is_symmetric(ls.spec)) throw Error(ErrorCode::ParityUnavailable, ls.spec.name + " is not symmetric");
    const int N = basis_size(ls, n_trunc);
    const CMat K = k_matrix(ls, r);
    // C cancels the diagonal, which is zero for a symmetric spec
    const cd C = 0.0;
    CVec a = CVec::Zero(N);
    const int first = parity == Parity::Even ? 0 : 1;
    if (first < N) a(first) = 1.0;
    for (int k = first + 1; k + 1 < N; k += 2) {
        const cd den = K(k, k + 1);
        if (std::abs(den) < 1e-300) throw Error(ErrorCode::ZeroDenominator, "K(k,k+1) = 0");
        a(k + 1) = -K(k, k - 1) * a(k - 1) / den;
    }
    auto st = make_state(ls, StateKind::MUCS, std::move(a));
    st.params["r"] = r;
    st.params["C"] = C;
    st.params["parity"] = parity == Parity::Even ? 1.0 : -1.0;
    return st;
}

StateExpansion cat_state(const LadderSet& ls, double r, cd k0, Parity parity, int n_trunc) {
    MucsParams p;
    p.r = r;
    p.k0 = k0;
    const auto plus = mucs_recursion(ls, p, n_trunc);
    p.k0 = -k0;
    const auto minus = mucs_recursion(ls, p, n_trunc);
    const double sgn = parity == Parity::Even ? 1.0 : -1.0;
    auto st = make_state(ls, StateKind::MUCS, plus.coeffs + sgn * minus.coeffs);
    st.params["r"] = r;
    st.params["k0"] = k0;
    st.params["parity"] = sgn;
    return st;
}

double parity_defect(const EigenSystem& es, const StateExpansion& st, Parity parity) {
    const int N = static_cast<int>(st.coeffs.size());
    if (N > es.count()) throw Error(ErrorCode::BasisMismatch, "state longer than eigen basis");
    const double sgn = parity == Parity::Even ? 1.0 : -1.0;
    double num = 0.0, den = 0.0;
    for (double x : es.grid.nodes) {
        if (!es.spec.contains(-x)) continue;
        const auto fp = es.eval(x, N), fm = es.eval(-x, N);
        cd vp = 0.0, vm = 0.0;
        for (int k = 0; k < N; ++k) {
            vp += st.coeffs(k) * fp.f[k];
            vm += st.coeffs(k) * fm.f[k];
        }
        num = std::max(num, std::abs(vm - sgn * vp));
        den = std::max(den, std::abs(vp));
    }
    return den > 0 ? num / den : num;
}

double eigen_residual(const LadderSet& ls, const StateExpansion& st, double r, cd C) {
    const int N = static_cast<int>(st.coeffs.size());
    const CMat K = k_matrix(ls, r).topLeftCorner(N, N);
    const CMat X = ls.x_matrix.topLeftCorner(N, N);
    // X is real tridiagonal
    const Eigen::VectorXd diag = X.diagonal().real();
    const Eigen::VectorXd sub = N > 1 ? Eigen::VectorXd(X.diagonal(-1).real()) : Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    const double xn = es.eigenvalues().cwiseAbs().maxCoeff();
    const CVec res = K * st.coeffs - C * st.coeffs;
    return res.norm() / (st.coeffs.norm() * xn);
}

AuditReport uncertainty_audit(const LadderSet& ls, const StateExpansion& st) {
    AuditReport au;
    const int N = static_cast<int>(st.coeffs.size());
    if (N > ls.size()) throw Error(ErrorCode::BasisMismatch, "state longer than ladder basis");
    const CVec& a = st.coeffs;
    const CMat X = ls.x_matrix.topLeftCorner(N, N), P = ls.p_matrix.topLeftCorner(N, N);
    const CMat G = cd(0.0, -1.0) * (X * P - P * X);
    const double nn = a.squaredNorm();
    au.mean_x = a.dot(X * a) / nn;
    au.mean_p = a.dot(P * a) / nn;
    au.mean_g = a.dot(G * a) / nn;
    au.var_x = (X * a).squaredNorm() / nn - std::norm(au.mean_x);
    au.var_p = (P * a).squaredNorm() / nn - std::norm(au.mean_p);
    au.r_sc = au.mean_g.real() / (2.0 * au.var_p);
    au.C_sc = au.mean_x + cd(0.0, au.r_sc) * au.mean_p;
    au.eigen_residual = eigen_residual(ls, st, au.r_sc, au.C_sc);
    au.saturation_defect = std::sqrt(std::max(0.0, au.var_x * au.var_p)) - std::abs(au.mean_g) / 2.0;
    au.relative_defect = au.saturation_defect / std::abs(au.mean_g);
    return au;
}

std::vector<double> aocs_f(const LadderSet& ls, FMode mode) {
    const Sector& s = ls.sector;
    std::vector<double> F(ls.size());
    for (int i = 0; i < ls.size(); ++i) {
        const int k = ls.m + i + 1;  // F at level k-1 pairs with the lowering from k
        if (mode == FMode::Printed) {
            F[i] = k * s.mu(k) / s.eps(k);
        } else {
            int s1, s2;
            const double lr = s.log_lead(k - 1, &s1) - s.log_lead(k, &s2);
            F[i] = (k - ls.m) * s1 * s2 * std::exp(lr) * s.mu(k) / s.eps(k);
        }
    }
    return F;
}

StateExpansion aocs_recursion(const LadderSet& ls, cd beta0, int n_trunc, FMode mode) {
    const int N = basis_size(ls, n_trunc);
    const Sector& s = ls.sector;
    CVec a = CVec::Zero(N);
    a(0) = 1.0;
    if (beta0 != cd(0.0)) {
        if (mode == FMode::Consistent) {
            // beta0^n lead_n / (n-m)! times N_n, relative to n = m
            int s0;
            const double l0 = s.log_lead(ls.m, &s0);
            double lc = 0.0;
            for (int i = 1; i < N; ++i) {
                const int n = ls.m + i;
                int sn;
                lc += 0.5 * std::log(s.c(n));
                const double l = i * std::log(std::abs(beta0)) + s.log_lead(n, &sn) - l0 - std::lgamma(i + 1.0) + lc;
                a(i) = std::polar(std::exp(l), i * std::arg(beta0)) * double(sn * s0);
            }
        } else {
            // a_{k} = beta0 a_{k-1} / (F_{k-1} L_k)
            const auto F = aocs_f(ls, mode);
            for (int i = 1; i < N; ++i) a(i) = beta0 * a(i - 1) / (F[i - 1] * ls.a_tilde(i - 1, i));
        }
    }
    auto st = make_state(ls, StateKind::AOCS, std::move(a));
    st.params["beta0"] = beta0;
    st.params["f_mode"] = mode == FMode::Consistent ? 0.0 : 1.0;
    return st;
}

double aocs_residual(const LadderSet& ls, const StateExpansion& st, cd beta0, FMode mode) {
    const int N = static_cast<int>(st.coeffs.size());
    const auto F = aocs_f(ls, mode);
    CVec v = ls.a_tilde.topLeftCorner(N, N) * st.coeffs;
    for (int i = 0; i < N; ++i) v(i) *= F[i];
    return (v - beta0 * st.coeffs).norm() / st.coeffs.norm();
}

double lagrange_radius(const MasterSpec& spec, double x) {
    // (c1 t - 1)^2 - 4 c2 t (x + c0 t) = 0
    const double c0 = spec.a_coeffs[0], c1 = spec.a_coeffs[1], c2 = spec.a_coeffs[2];
    const double qa = c1 * c1 - 4.0 * c2 * c0, qb = -2.0 * c1 - 4.0 * c2 * x, qc = 1.0;
    const double inf = std::numeric_limits<double>::infinity();
    if (qa == 0.0) return qb == 0.0 ? inf : std::abs(qc / qb);
    const cd d = std::sqrt(cd(qb * qb - 4.0 * qa * qc));
    const cd r1 = (-qb + d) / (2.0 * qa), r2 = (-qb - d) / (2.0 * qa);
    return std::min(std::abs(r1), std::abs(r2));
}

namespace {

// sum_n t^n/n! phi_n^{(m)}(x), each phi_n expanded about x so no cancellation occurs on evaluation
double series_eval(const MasterSpec& spec, int m, double t, double x, int cap) {
    const auto d = drift_line(spec);
    const Poly A({spec.A_at(x), spec.dA_at(x), spec.a_coeffs[2]}), dA = A.derivative();
    const Poly s({d.C + d.A1 * x, d.A1});
    double mfact = std::tgamma(m + 1.0);
    double sum = 0.0, tn = std::pow(t, m);
    int small = 0;
    for (int n = m; n <= cap; ++n) {
        Poly p = Poly::constant(1.0);
        for (int j = 0; j < n; ++j) p = (1.0 / (j + 1)) * ((double(n - j) * dA + s) * p + A * p.derivative());
        const double term = tn * p.coeff(m) * mfact;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) {
            if (++small >= 4) break;
        } else {
            small = 0;
        }
        tn *= t;
    }
    return sum;
}

}  // namespace

double generating_series(const MasterSpec& spec, int m, double t, double x, int cap) {
    return series_eval(spec, m, t, x, cap);
}

double generating_closed(const MasterSpec& spec, int m, double t, double x) {
    if (m < 0 || m > 2) throw Error(ErrorCode::BadQuantumNumbers, "closed form implemented for m <= 2");
    const double z = solve_lagrange(spec, x, t);
    if (!spec.contains(z)) return std::numeric_limits<double>::quiet_NaN();
    const auto d = drift_line(spec);
    const double c2 = spec.a_coeffs[2], A2 = spec.A2();
    const double sx = d.C + d.A1 * x, Az = spec.A_at(z);
    const double z1 = 1.0 / (1.0 - t * spec.dA_at(z));
    const double z2 = t * A2 * z1 * z1 * z1;
    const double z3 = 3.0 * t * t * A2 * A2 * std::pow(z1, 5);
    // R = A(z)/A(x) without dividing by A(x)
    const double R = 1.0 / (1.0 - t * spec.dA_at(x) - c2 * t * t * Az);
    const double R1 = R * R * (c2 * t) * (2.0 + t * spec.dA_at(z) * z1);
    const double e = std::exp(spec.weight.log_value(z) - spec.weight.log_value(x));
    const double P1 = t * z1 * (d.A1 + c2 * t * sx * R);
    const double P2 = t * z2 * (d.A1 + c2 * t * sx * R) + t * z1 * c2 * t * (d.A1 * R + sx * R1);
    if (m == 0) return e * z1;
    if (m == 1) return e * (P1 * z1 + z2);
    return e * ((P2 + P1 * P1) * z1 + 2.0 * P1 * z2 + z3);
}

GeneratingCheck generating_check(const MasterSpec& spec, int m, double t, const Grid& grid) {
    GeneratingCheck gc;
    double num = 0.0, den = 0.0;
    for (double x : grid.nodes) {
        if (std::abs(t) > 0.5 * lagrange_radius(spec, x)) {
            ++gc.skipped;
            continue;
        }
        const double cf = generating_closed(spec, m, t, x);
        if (!std::isfinite(cf)) {
            ++gc.skipped;
            continue;
        }
        const double sr = series_eval(spec, m, t, x, 150);
        // compare as wavefunction samples: envelope A^{1/4 + m/2} W^{1/2}
        const double env = std::exp((0.25 + 0.5 * m) * std::log(spec.A_at(x)) + 0.5 * spec.weight.log_value(x));
        num = std::max(num, std::abs(sr - cf) * env);
        den = std::max(den, std::abs(cf) * env);
        ++gc.compared;
    }
    gc.max_rel_diff = den > 0 ? num / den : num;
    return gc;
}

cd overlap(const StateExpansion& a, const StateExpansion& b) {
    if (!(a.spec == b.spec) || a.m != b.m) throw Error(ErrorCode::BasisMismatch, "different spec or sector");
    const Eigen::Index n = std::min(a.coeffs.size(), b.coeffs.size());
    return a.coeffs.head(n).dot(b.coeffs.head(n));
}

std::vector<cd> grid_samples(const EigenSystem& es, const StateExpansion& st) {
    const int N = static_cast<int>(st.coeffs.size());
    if (N > es.count()) throw Error(ErrorCode::BasisMismatch, "state longer than eigen basis");
    std::vector<cd> out(es.grid.size(), 0.0);
    for (int k = 0; k < N; ++k)
        for (std::size_t i = 0; i < es.grid.size(); ++i) out[i] += st.coeffs(k) * es.wavefunctions[k][i];
    return out;
}

}  // namespace sip
