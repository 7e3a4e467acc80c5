#include "sip/crosscheck.hpp"

#include <algorithm>
#include <cmath>

#include "sip/coherent_states.hpp"
#include "sip/dynamics.hpp"
#include "sip/report.hpp"

namespace sip {

namespace {

struct Table {
    std::vector<Finding>& rows;
    const MasterSpec& spec;
    double tol;

    void compare(const std::string& column, const std::string& text, int n, int m, double printed, double computed,
                 const std::string& note = "") {
        Finding f{spec.name, column, text, n, m, printed, computed, std::abs(printed - computed), false, note};
        const double scale = std::max({1.0, std::abs(printed), std::abs(computed)});
        f.agrees = std::isfinite(f.difference) && f.difference <= tol * scale;
        if (!std::isfinite(printed)) f.note += f.note.empty() ? "printed formula not finite here" : "; printed formula not finite here";
        rows.push_back(f);
    }
    void defect(const std::string& column, const std::string& text, int m, double value, double limit,
                const std::string& note = "") {
        Finding f{spec.name, column, text, 0, m, std::nullopt, std::nullopt, value, value <= limit, note};
        rows.push_back(f);
    }
    void failed(const std::string& column, const std::string& text, int n, int m, const std::string& why) {
        Finding f{spec.name, column, text, n, m, std::nullopt, std::nullopt, NAN, false, why};
        rows.push_back(f);
    }
};

double sample_point(const MasterSpec& spec, double u) {
    if (std::isfinite(spec.a) && std::isfinite(spec.b)) return spec.a + u * (spec.b - spec.a);
    if (std::isfinite(spec.a)) return spec.a + 4.0 * u;
    if (std::isfinite(spec.b)) return spec.b - 4.0 * u;
    return 4.0 * (u - 0.5);
}

}  // namespace

std::vector<Finding> crosscheck(const MasterSpec& spec, const CrosscheckOptions& opt) {
    require_valid(spec);
    std::vector<Finding> rows;
    Table tab{rows, spec, opt.tol};
    const auto rec = reference_record(spec);

    for (int m = 0; m <= 1; ++m) {
        const int cap = sector_cap(spec, m, opt.nmax);
        if (cap < m + 2) continue;
        const Sector sec(spec, m);
        const int top = std::min(cap, m + opt.levels);

        if (rec) {
            for (int n = m + 1; n <= top; ++n)
                tab.compare("mu", rec->mu_text, n, m, rec->mu(n, m), mu_value(spec, n, m), "general ladder amplitude");
            for (int n = m; n <= top; ++n)
                tab.compare("energy", rec->energy_text, n, m, rec->energy(n, m), sec.energy(n));
            for (int n = m; n <= top; ++n) {
                const double E = sec.energy(n);
                try {
                    const auto cp = classical_phase(spec, m, E);
                    tab.compare("omega_c", rec->omega_text, n, m, rec->omega_c(E, m), cp.omega_c, "fitted quadratic");
                } catch (const Error& e) {
                    tab.failed("omega_c", rec->omega_text, n, m, e.what());
                }
            }
        }

        auto es = build_eigensystem(spec, m, cap, opt.npoints);
        auto ls = build_ladder(es, cap);

        if (rec) {
            for (int i = 1; i <= 3; ++i) {
                const double x = sample_point(spec, 0.25 * i);
                if (spec.name == "three_dim_oscillator") {
                    const int n = m + i - 1;
                    if (n - m >= ls.size() - 1) break;
                    tab.compare("G", rec->g_text, n, m, rec->g(x, sec.energy(n), m, ls.x0, ls.p0),
                                ls.g_exact(n - m, n - m).real(), "diagonal of -i[X,P]");
                } else {
                    tab.compare("G", rec->g_text, 0, m, rec->g(x, 0.0, m, ls.x0, ls.p0), ls.x0 * ls.p0 * spec.A_at(x),
                                "x0 p0 A(x) at x = " + format_double(x));
                }
            }
            const double k0 = spec.name == "three_dim_oscillator" ? -opt.k0 : opt.k0;
            try {
                auto st = mucs_two_term(ls, k0, std::min(ls.size() - 1, opt.levels + 1));
                for (int i = 1; i <= opt.levels && i < st.coeffs.size(); ++i) {
                    int sg = 1;
                    const double printed = rec->log_an_ratio(i, m, k0, &sg);
                    const double computed = std::log(std::abs(st.coeffs(i) / st.coeffs(0)));
                    tab.compare("an_ratio_log", rec->an_text, m + i, m, printed, computed, "two-term state, k0 = " + format_double(k0));
                }
            } catch (const Error& e) {
                tab.failed("an_ratio_log", rec->an_text, m, m, e.what());
            }
        }

        const auto pf = printed_forms(ls, es);
        tab.defect("a_dagger", "printed adjoint of A", m, pf.a_dagger_defect, 1e-6);
        tab.defect("b_dagger", "printed adjoint of B", m, pf.b_dagger_defect, 1e-6);
        tab.defect("x_ladder", "x0[A + A^+ + B + B^+]", m, pf.x_ladder_defect, 1e-6);
        tab.defect("p_ladder", "(p0/2i)[A + B^+ - A^+ - B]", m, pf.p_ladder_defect, 1e-6);
        tab.defect("p_printed", "(p0/2i)(A d/dx + d/dx A)", m, pf.p_printed_defect, 1e-6);

        {
            const double E = sec.energy(m);
            const auto pr = eta_printed(spec, m, E);
            try {
                const auto cp = classical_phase(spec, m, E);
                const double fit[3] = {cp.eta1, cp.eta2, cp.eta3};
                for (int k = 0; k < 3; ++k)
                    tab.compare("eta" + std::to_string(k + 1), "printed eta" + std::to_string(k + 1), m, m, pr[k], fit[k],
                                "fit of A(E - V_m)");
            } catch (const Error& e) {
                tab.failed("eta", "printed eta", m, m, e.what());
            }
        }

        {
            MucsParams p;
            p.r = balanced_ratio(ls);
            p.k0 = opt.k0;
            const int nt = ls.size() - 1;
            try {
                auto ex = mucs_recursion(ls, p, nt);
                auto pr = mucs_recursion(ls, p, nt, RecursionMode::Printed);
                tab.defect("mucs_printed_recursion", "printed three-term recursion", m,
                           eigen_residual(ls, pr, p.r, ex.params.at("C")), 1e-6, "eigen-residual of its state");
            } catch (const Error& e) {
                tab.failed("mucs_printed_recursion", "printed three-term recursion", m, m, e.what());
            }
            try {
                auto ao = aocs_recursion(ls, 0.3, ls.size() - 1, FMode::Printed);
                tab.defect("aocs_printed_f", "F(k) = k mu_k / E(k)", m, aocs_residual(ls, ao, 0.3, FMode::Printed), 1e-6,
                           "residual of F(H) A~ a - beta0 a");
            } catch (const Error& e) {
                tab.failed("aocs_printed_f", "F(k) = k mu_k / E(k)", m, m, e.what());
            }
        }

        {
            const auto ev = build_evolution(ls, es);
            auto [xo, po] = evolution_oracle(ev, opt.t);
            tab.defect("x_of_t", "closed form X(t)", m, frobenius_block(xo, heisenberg_xt(ev, opt.t)), 1e-6,
                       "Frobenius distance to the conjugation, t = " + format_double(opt.t));
            tab.defect("p_of_t", "closed form P(t)", m, frobenius_block(po, heisenberg_pt(ev, opt.t)), 1e-6,
                       "Frobenius distance to the conjugation, t = " + format_double(opt.t));
        }
    }
    return rows;
}

nlohmann::json findings_json(const std::vector<Finding>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& f : rows) {
        nlohmann::json j;
        j["preset"] = f.preset;
        j["column"] = f.column;
        j["printed_text"] = f.printed_text;
        j["n"] = f.n;
        j["m"] = f.m;
        j["printed"] = f.printed ? num_json(*f.printed) : nlohmann::json(nullptr);
        j["computed"] = f.computed ? num_json(*f.computed) : nlohmann::json(nullptr);
        j["difference"] = num_json(f.difference);
        j["agrees"] = f.agrees;
        j["note"] = f.note;
        out.push_back(j);
    }
    return out;
}

}  // namespace sip
