#include "sip/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sip/coherent_states.hpp"
#include "sip/crosscheck.hpp"
#include "sip/dynamics.hpp"
#include "sip/report.hpp"

namespace sip {

using nlohmann::json;

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct Output {
    json result = json::object();
    Table table;
    int status = 0;
};

std::string fmt(double v) { return format_double(v); }

json matrix_json(const CMat& a) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        json r = json::array(), s = json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            r.push_back(num_json(a(i, j).real()));
            s.push_back(num_json(a(i, j).imag()));
        }
        re.push_back(r);
        im.push_back(s);
    }
    return json{{"re", re}, {"im", im}};
}

json coeffs_json(const CVec& a) {
    json out = json::array();
    for (Eigen::Index i = 0; i < a.size(); ++i) out.push_back(complex_json(a(i)));
    return out;
}

json params_json(const std::map<std::string, cd>& p) {
    json out = json::object();
    for (const auto& [k, v] : p) out[k] = complex_json(v);
    return out;
}

MasterSpec resolve_spec(const RunConfig& c) {
    if (!c.spec_path.empty()) return load_spec(c.spec_path);
    if (!c.preset.empty()) return preset(c.preset, c.overrides);
    throw Error(ErrorCode::Parse, "either --spec or --preset is required");
}

std::vector<double> t_values(const RunConfig& c) {
    if (c.t_steps < 1) throw Error(ErrorCode::Parse, "t-range needs at least one step");
    std::vector<double> ts;
    for (int i = 0; i < c.t_steps; ++i)
        ts.push_back(c.t_steps == 1 ? c.t_start : c.t_start + (c.t_stop - c.t_start) * i / (c.t_steps - 1));
    return ts;
}

struct Built {
    EigenSystem es;
    LadderSet ls;
};

Built build_basis(const MasterSpec& spec, const RunConfig& c, int top) {
    const int cap = std::min(top, ladder_cap(spec, c.m));
    Built b{build_eigensystem(spec, c.m, cap, c.npoints), {}};
    b.ls = build_ladder(b.es, cap, c.x0, c.p0);
    return b;
}

cd k0_of(const RunConfig& c) { return {c.k0_re, c.k0_im}; }

StateExpansion make_mucs(const LadderSet& ls, const RunConfig& c) {
    MucsParams p;
    p.r = c.squeeze_ratio ? *c.squeeze_ratio : balanced_ratio(ls);
    p.k0 = k0_of(c);
    p.self_consistent = c.self_consistent;
    const auto mode = c.recursion == "printed" ? RecursionMode::Printed : RecursionMode::Exact;
    return mucs_recursion(ls, p, std::min(c.ntrunc, ls.size() - 1), mode);
}

FMode f_mode_of(const RunConfig& c) { return c.f_mode == "printed" ? FMode::Printed : FMode::Consistent; }
Parity parity_of(const RunConfig& c) { return c.parity == "odd" ? Parity::Odd : Parity::Even; }

StateExpansion make_state(const LadderSet& ls, const RunConfig& c) {
    if (c.state == "aocs")
        return aocs_recursion(ls, {c.beta0_re, c.beta0_im}, std::min(c.ntrunc, ls.size() - 1), f_mode_of(c));
    if (c.state == "cat") {
        const double r = c.squeeze_ratio ? *c.squeeze_ratio : 0.5 * balanced_ratio(ls);
        return mucs_parity(ls, r, parity_of(c), std::min(c.ntrunc, ls.size() - 1));
    }
    return make_mucs(ls, c);
}

json audit_json(const AuditReport& a) {
    return json{{"mean_x", complex_json(a.mean_x)},
                {"mean_p", complex_json(a.mean_p)},
                {"mean_g", complex_json(a.mean_g)},
                {"var_x", num_json(a.var_x)},
                {"var_p", num_json(a.var_p)},
                {"r_sc", num_json(a.r_sc)},
                {"C_sc", complex_json(a.C_sc)},
                {"eigen_residual", num_json(a.eigen_residual)},
                {"saturation_defect", num_json(a.saturation_defect)},
                {"relative_defect", num_json(a.relative_defect)}};
}

void state_output(Output& o, const StateExpansion& st, const RunConfig& c) {
    const bool converged = st.tail_mass < c.tail_limit;
    o.result["kind"] = to_string(st.kind);
    o.result["m"] = st.m;
    o.result["n_trunc"] = st.n_trunc;
    o.result["coefficients"] = coeffs_json(st.coeffs);
    o.result["params"] = params_json(st.params);
    o.result["tail_mass"] = num_json(st.tail_mass);
    o.result["converged"] = converged;
    o.result["iterations"] = st.iterations;
    o.table.header = {"n", "re", "im", "abs2"};
    for (Eigen::Index i = 0; i < st.coeffs.size(); ++i)
        o.table.rows.push_back({std::to_string(st.m + i), fmt(st.coeffs(i).real()), fmt(st.coeffs(i).imag()),
                                fmt(std::norm(st.coeffs(i)))});
    if (!converged) o.status = 3;
}

Output cmd_validate(const MasterSpec& spec) {
    Output o;
    const auto rep = validate(spec);
    json checks = json::array();
    o.table.header = {"check", "passed", "detail"};
    for (const auto& ch : rep.checks) {
        checks.push_back(json{{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
        o.table.rows.push_back({ch.name, ch.passed ? "true" : "false", ch.detail});
    }
    o.result["checks"] = checks;
    o.result["valid"] = rep.ok();
    o.result["max_normalizable_n"] = max_normalizable_n(spec, 0);
    if (!rep.ok()) o.status = 2;
    return o;
}

Output cmd_orthopoly(const MasterSpec& spec, const RunConfig& c) {
    Output o;
    const auto ps = build_polys(spec, c.nmax, c.npoints);
    const auto grid = build_grid(spec, c.npoints, 0);
    json polys = json::array();
    o.table.header = {"n", "gamma", "norm", "eigen_residual", "coefficients"};
    for (int n = 0; n <= ps.max_n; ++n) {
        json co = json::array();
        std::string cs;
        for (double v : ps.polys[n].coeffs()) {
            co.push_back(num_json(v));
            cs += (cs.empty() ? "" : " ") + fmt(v);
        }
        const double res = eigen_residual(ps, n, grid);
        polys.push_back(json{{"n", n},
                             {"gamma", num_json(ps.gammas[n])},
                             {"norm", num_json(ps.norms[n])},
                             {"eigen_residual", num_json(res)},
                             {"coefficients", co}});
        o.table.rows.push_back({std::to_string(n), fmt(ps.gammas[n]), fmt(ps.norms[n]), fmt(res), cs});
    }
    o.result["polynomials"] = polys;
    o.result["max_n"] = ps.max_n;
    o.result["truncated"] = ps.truncated;
    return o;
}

Output cmd_spectrum(const MasterSpec& spec, const RunConfig& c) {
    Output o;
    const auto es = build_eigensystem(spec, c.m, sector_cap(spec, c.m, c.nmax), c.npoints);
    const auto rec = reference_record(spec);
    json levels = json::array();
    o.table.header = {"n", "m", "E", "E_table", "nodes", "residual"};
    for (int n = c.m; n <= es.max_n; ++n) {
        const double E = es.energy(n);
        const double Et = rec ? rec->energy(n, c.m) : NAN;
        const int nodes = node_count(es, n);
        const double res = schrodinger_residual(es, n);
        levels.push_back(json{{"n", n},
                              {"E", num_json(E)},
                              {"E_table", rec ? num_json(Et) : json(nullptr)},
                              {"nodes", nodes},
                              {"residual", num_json(res)}});
        o.table.rows.push_back({std::to_string(n), std::to_string(c.m), fmt(E), rec ? fmt(Et) : "", std::to_string(nodes), fmt(res)});
    }
    o.result["levels"] = levels;
    o.result["m"] = c.m;
    o.result["max_n"] = es.max_n;
    return o;
}

Output cmd_wavefunction(const MasterSpec& spec, const RunConfig& c) {
    Output o;
    const auto es = build_eigensystem(spec, c.m, sector_cap(spec, c.m, c.nmax), c.npoints);
    o.table.header = {"x", "xi", "V"};
    for (int n = c.m; n <= es.max_n; ++n) o.table.header.push_back("psi_" + std::to_string(n));
    json x = json::array(), xi = json::array(), V = json::array(), psi = json::array();
    for (int k = 0; k < es.count(); ++k) psi.push_back(vector_json(es.wavefunctions[k]));
    for (std::size_t i = 0; i < es.grid.size(); ++i) {
        x.push_back(num_json(es.grid.nodes[i]));
        xi.push_back(num_json(es.xi[i]));
        V.push_back(num_json(es.potential[i]));
        std::vector<std::string> row{fmt(es.grid.nodes[i]), fmt(es.xi[i]), fmt(es.potential[i])};
        for (int k = 0; k < es.count(); ++k) row.push_back(fmt(es.wavefunctions[k][i]));
        o.table.rows.push_back(row);
    }
    o.result["x"] = x;
    o.result["xi"] = xi;
    o.result["potential"] = V;
    o.result["psi"] = psi;
    o.result["map"] = to_string(es.grid.map_kind);
    return o;
}

Output cmd_operators(const MasterSpec& spec, const RunConfig& c) {
    Output o;
    const auto b = build_basis(spec, c, c.m + c.nmax);
    const auto& ls = b.ls;
    const auto pf = printed_forms(ls, b.es);
    o.result["energies"] = vector_json(ls.energies);
    o.result["mu"] = vector_json(ls.mu);
    o.result["eps"] = vector_json(ls.eps);
    o.result["delta"] = vector_json(ls.delta);
    o.result["x_matrix"] = matrix_json(ls.x_matrix);
    o.result["p_matrix"] = matrix_json(ls.p_matrix);
    o.result["g_matrix"] = matrix_json(ls.g_matrix);
    o.result["defects"] = json{{"a_dagger_printed", num_json(pf.a_dagger_defect)},
                               {"b_dagger_printed", num_json(pf.b_dagger_defect)},
                               {"x_ladder", num_json(pf.x_ladder_defect)},
                               {"p_ladder", num_json(pf.p_ladder_defect)},
                               {"p_printed", num_json(pf.p_printed_defect)},
                               {"p_hermitian", num_json(pf.p_hermitian_defect)},
                               {"x_multiplication", num_json(pf.x_mult_defect)},
                               {"g_vs_exact", num_json(inner_block_diff(ls.g_matrix, ls.g_exact, 2))}};
    o.table.header = {"n", "E", "mu", "eps", "x_diag", "x_upper", "p_upper_im", "g_diag"};
    for (int i = 0; i < ls.size(); ++i) {
        const bool up = i + 1 < ls.size();
        o.table.rows.push_back({std::to_string(ls.m + i), fmt(ls.energies[i]), i > 0 ? fmt(ls.mu[i - 1]) : "",
                                i > 0 ? fmt(ls.eps[i - 1]) : "", fmt(ls.x_matrix(i, i).real()),
                                up ? fmt(ls.x_matrix(i, i + 1).real()) : "", up ? fmt(ls.p_matrix(i, i + 1).imag()) : "",
                                fmt(ls.g_matrix(i, i).real())});
    }
    return o;
}

Output cmd_classical(const MasterSpec& spec, const RunConfig& c) {
    Output o;
    const Sector sec(spec, c.m);
    const int top = std::min(sector_cap(spec, c.m, c.nmax), c.m + 5);
    json levels = json::array();
    std::optional<ClassicalPhase> ground;
    for (int n = c.m; n <= top; ++n) {
        const double E = sec.energy(n);
        const auto pr = eta_printed(spec, c.m, E);
        json lv{{"n", n}, {"E", num_json(E)}, {"eta_printed", vector_json({pr[0], pr[1], pr[2]})}};
        try {
            const auto cp = classical_phase(spec, c.m, E, c.x0);
            lv["eta_fit"] = vector_json({cp.eta1, cp.eta2, cp.eta3});
            lv["cubic_residual"] = num_json(cp.cubic_residual);
            lv["omega_c"] = num_json(cp.omega_c);
            lv["amplitude"] = num_json(cp.amplitude);
            lv["offset"] = num_json(cp.offset);
            if (!ground) ground = cp;
        } catch (const Error& e) {
            lv["error"] = e.what();
        }
        levels.push_back(lv);
    }
    o.result["levels"] = levels;
    o.table.header = {"t", "x", "p"};
    if (ground) {
        json orbit = json::array();
        for (double t : t_values(c)) {
            const auto xp = classical_orbit(*ground, t);
            orbit.push_back(json{{"t", num_json(t)}, {"x", num_json(xp[0])}, {"p", num_json(xp[1])}});
            o.table.rows.push_back({fmt(t), fmt(xp[0]), fmt(xp[1])});
        }
        o.result["orbit"] = orbit;
    } else {
        o.status = 3;
    }
    return o;
}

Output cmd_mucs(const MasterSpec& spec, const RunConfig& c) {
    Output o;
    const auto b = build_basis(spec, c, c.m + c.ntrunc);
    const auto st = make_mucs(b.ls, c);
    state_output(o, st, c);
    o.result["audit"] = audit_json(uncertainty_audit(b.ls, st));
    o.result["balanced_ratio"] = num_json(balanced_ratio(b.ls));
    return o;
}

Output cmd_aocs(const MasterSpec& spec, const RunConfig& c) {
    Output o;
    const auto b = build_basis(spec, c, c.m + c.ntrunc);
    const cd beta0{c.beta0_re, c.beta0_im};
    const auto st = aocs_recursion(b.ls, beta0, std::min(c.ntrunc, b.ls.size() - 1), f_mode_of(c));
    state_output(o, st, c);
    o.result["residual"] = num_json(aocs_residual(b.ls, st, beta0, f_mode_of(c)));
    o.result["f"] = vector_json(aocs_f(b.ls, f_mode_of(c)));
    return o;
}

Output cmd_cat(const MasterSpec& spec, const RunConfig& c) {
    Output o;
    const auto b = build_basis(spec, c, c.m + c.ntrunc);
    const double r = c.squeeze_ratio ? *c.squeeze_ratio : 0.5 * balanced_ratio(b.ls);
    const int nt = std::min(c.ntrunc, b.ls.size() - 1);
    const auto st = mucs_parity(b.ls, r, parity_of(c), nt);
    state_output(o, st, c);
    o.result["audit"] = audit_json(uncertainty_audit(b.ls, st));
    o.result["parity_defect"] = num_json(parity_defect(b.es, st, parity_of(c)));
    const auto cat = cat_state(b.ls, r, k0_of(c), parity_of(c), nt);
    o.result["cat_overlap"] = num_json(std::abs(overlap(st, cat)));
    return o;
}

Output cmd_evolve(const MasterSpec& spec, const RunConfig& c) {
    Output o;
    const auto b = build_basis(spec, c, c.m + c.ntrunc);
    const auto st = make_state(b.ls, c);
    const auto ev = build_evolution(b.ls, b.es);
    json rows = json::array();
    o.table.header = {"t", "mean_x_re", "mean_x_im", "mean_p_re", "mean_p_im", "dx", "dp"};
    for (double t : t_values(c)) {
        const auto mo = state_moments(ev, st.coeffs, t, c.closed_form);
        rows.push_back(json{{"t", num_json(t)},
                            {"mean_x", complex_json(mo.mean_x)},
                            {"mean_p", complex_json(mo.mean_p)},
                            {"dx", num_json(mo.dx)},
                            {"dp", num_json(mo.dp)}});
        o.table.rows.push_back({fmt(t), fmt(mo.mean_x.real()), fmt(mo.mean_x.imag()), fmt(mo.mean_p.real()),
                                fmt(mo.mean_p.imag()), fmt(mo.dx), fmt(mo.dp)});
    }
    o.result["series"] = rows;
    o.result["path"] = c.closed_form ? "closed_form" : "conjugation";
    o.result["b0"] = num_json(ev.b0);
    o.result["omega0"] = num_json(ev.omega0);
    json wh = json::array();
    for (const auto& w : ev.omegaH_diag) wh.push_back(complex_json(w));
    o.result["omega_h"] = wh;
    o.result["b1"] = vector_json(ev.b1_diag);
    o.result["state_tail_mass"] = num_json(st.tail_mass);
    return o;
}

Output cmd_audit(const MasterSpec& spec, const RunConfig& c) {
    Output o;
    const auto b = build_basis(spec, c, c.m + c.ntrunc);
    const auto st = make_state(b.ls, c);
    const auto au = uncertainty_audit(b.ls, st);
    o.result = audit_json(au);
    o.result["tail_mass"] = num_json(st.tail_mass);
    o.result["converged"] = st.tail_mass < c.tail_limit;
    o.result["iterations"] = st.iterations;
    o.result["params"] = params_json(st.params);
    o.table.header = {"quantity", "value"};
    for (const auto& [k, v] : o.result.items())
        if (v.is_number()) o.table.rows.push_back({k, fmt(v.get<double>())});
    if (st.tail_mass >= c.tail_limit) o.status = 3;
    return o;
}

Output cmd_crosscheck(const RunConfig& c) {
    Output o;
    std::vector<MasterSpec> specs;
    if (c.all_presets) {
        for (const auto& n : preset_names()) specs.push_back(preset(n));
    } else {
        specs.push_back(resolve_spec(c));
    }
    CrosscheckOptions opt;
    opt.nmax = c.nmax;
    opt.npoints = c.npoints;
    opt.tol = c.tol;
    opt.k0 = c.k0_re;
    std::vector<Finding> all;
    for (const auto& s : specs) {
        auto rows = crosscheck(s, opt);
        all.insert(all.end(), rows.begin(), rows.end());
    }
    o.result["findings"] = findings_json(all);
    int agree = 0;
    for (const auto& f : all) agree += f.agrees;
    o.result["rows"] = static_cast<int>(all.size());
    o.result["agreeing"] = agree;
    o.table.header = {"preset", "column", "n", "m", "printed", "computed", "difference", "agrees", "printed_text", "note"};
    for (const auto& f : all)
        o.table.rows.push_back({f.preset, f.column, std::to_string(f.n), std::to_string(f.m),
                                f.printed ? fmt(*f.printed) : "", f.computed ? fmt(*f.computed) : "", fmt(f.difference),
                                f.agrees ? "true" : "false", f.printed_text, f.note});
    return o;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string render_csv(const json& config, const Table& t) {
    std::ostringstream os;
    for (const auto& [k, v] : config.items()) os << "# " << k << " = " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << csv_field(t.header[i]);
    os << "\n";
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(r[i]);
        os << "\n";
    }
    return os.str();
}

}  // namespace

json config_json(const RunConfig& c) {
    json j;
    j["subcommand"] = c.subcommand;
    j["spec_path"] = c.spec_path;
    j["preset"] = c.preset;
    json ov = json::object();
    for (const auto& [k, v] : c.overrides) ov[k] = num_json(v);
    j["overrides"] = ov;
    j["all_presets"] = c.all_presets;
    j["m"] = c.m;
    j["nmax"] = c.nmax;
    j["ntrunc"] = c.ntrunc;
    j["npoints"] = c.npoints;
    j["x0"] = num_json(c.x0);
    j["p0"] = num_json(c.p0);
    j["k0"] = complex_json({c.k0_re, c.k0_im});
    j["squeeze_ratio"] = c.squeeze_ratio ? num_json(*c.squeeze_ratio) : json("balanced");
    j["self_consistent"] = c.self_consistent;
    j["recursion"] = c.recursion;
    j["beta0"] = complex_json({c.beta0_re, c.beta0_im});
    j["f_mode"] = c.f_mode;
    j["parity"] = c.parity;
    j["state"] = c.state;
    j["t_range"] = vector_json({c.t_start, c.t_stop, double(c.t_steps)});
    j["paper_form"] = c.closed_form;
    j["tol"] = num_json(c.tol);
    j["tail_limit"] = num_json(c.tail_limit);
    j["output"] = c.output;
    j["format"] = c.format;
    return j;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
    Output o;
    json spec_j = nullptr;
    try {
        if (c.subcommand == "crosscheck") {
            o = cmd_crosscheck(c);
        } else {
            const MasterSpec spec = resolve_spec(c);
            spec_j = spec_json(spec);
            if (c.subcommand == "validate") {
                o = cmd_validate(spec);
            } else {
                require_valid(spec);
                if (c.subcommand == "orthopoly") o = cmd_orthopoly(spec, c);
                else if (c.subcommand == "spectrum") o = cmd_spectrum(spec, c);
                else if (c.subcommand == "wavefunction") o = cmd_wavefunction(spec, c);
                else if (c.subcommand == "operators") o = cmd_operators(spec, c);
                else if (c.subcommand == "classical") o = cmd_classical(spec, c);
                else if (c.subcommand == "mucs") o = cmd_mucs(spec, c);
                else if (c.subcommand == "aocs") o = cmd_aocs(spec, c);
                else if (c.subcommand == "cat") o = cmd_cat(spec, c);
                else if (c.subcommand == "evolve") o = cmd_evolve(spec, c);
                else if (c.subcommand == "audit") o = cmd_audit(spec, c);
                else throw Error(ErrorCode::Parse, "unknown subcommand " + c.subcommand);
            }
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return is_validation_error(e.code()) ? 2 : 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }

    const json config = config_json(c);
    std::string text;
    if (c.format == "csv") {
        text = render_csv(config, o.table);
    } else {
        json doc{{"config", config}, {"spec", spec_j}, {"result", o.result}, {"status", o.status}};
        text = dump_json(doc);
    }
    if (c.output.empty()) {
        out << text;
    } else {
        std::ofstream f(c.output, std::ios::binary);
        if (!f) {
            err << "error: cannot write " << c.output << "\n";
            return 3;
        }
        f << text;
    }
    return o.status;
}

int cli_main(int argc, char** argv) {
    CLI::App app{"Shape-invariant potentials, ladder operators and coherent states"};
    app.require_subcommand(1, 1);
    RunConfig c;
    std::string t_range;
    std::vector<std::string> overrides;
    std::optional<double> squeeze;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"validate", "check admissibility of a spec"},
        {"orthopoly", "Rodrigues polynomials, norms and residuals"},
        {"spectrum", "energies E(n,m)"},
        {"wavefunction", "sector wavefunctions on the grid"},
        {"operators", "ladder, X, P and G matrices"},
        {"classical", "classical phase-space trajectory"},
        {"mucs", "minimum-uncertainty coherent state"},
        {"aocs", "annihilation-operator coherent state"},
        {"cat", "even or odd parity states"},
        {"evolve", "Heisenberg evolution of moments"},
        {"audit", "uncertainty audit of a state"},
        {"crosscheck", "printed formulas against direct evaluation"}};
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--spec", c.spec_path, "spec JSON file")->check(CLI::ExistingFile);
        sub->add_option("--preset", c.preset, "preset name");
        sub->add_option("--param", overrides, "preset parameter override key=value");
        sub->add_option("--m", c.m, "sector index")->check(CLI::NonNegativeNumber);
        sub->add_option("--nmax", c.nmax, "highest level")->check(CLI::NonNegativeNumber);
        sub->add_option("--ntrunc", c.ntrunc, "coherent-state truncation")->check(CLI::PositiveNumber);
        sub->add_option("--npoints", c.npoints, "quadrature nodes")->check(CLI::PositiveNumber);
        sub->add_option("--x0", c.x0, "X scale");
        sub->add_option("--p0", c.p0, "P scale");
        sub->add_option("--k0-re", c.k0_re, "Re k0");
        sub->add_option("--k0-im", c.k0_im, "Im k0");
        sub->add_option("--squeeze-ratio", squeeze, "r in X + i r P");
        sub->add_flag("--self-consistent", c.self_consistent, "iterate r and C to self-consistency");
        sub->add_option("--recursion", c.recursion, "exact | printed")->check(CLI::IsMember({"exact", "printed"}));
        sub->add_option("--beta0-re", c.beta0_re, "Re beta0");
        sub->add_option("--beta0-im", c.beta0_im, "Im beta0");
        sub->add_option("--f-mode", c.f_mode, "consistent | printed")->check(CLI::IsMember({"consistent", "printed"}));
        sub->add_option("--parity", c.parity, "even | odd")->check(CLI::IsMember({"even", "odd"}));
        sub->add_option("--state", c.state, "mucs | aocs | cat")->check(CLI::IsMember({"mucs", "aocs", "cat"}));
        sub->add_option("--t-range", t_range, "start,stop,steps");
        sub->add_flag("--paper-form", c.closed_form, "use the closed-form X(t), P(t)");
        sub->add_option("--tol", c.tol, "agreement tolerance");
        sub->add_option("--tail-limit", c.tail_limit, "truncation tail-mass limit");
        sub->add_option("--output", c.output, "output path, standard output when absent");
        sub->add_option("--format", c.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
        if (name == "crosscheck") sub->add_flag("--all", c.all_presets, "run every preset");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    c.subcommand = app.get_subcommands().front()->get_name();
    c.squeeze_ratio = squeeze;
    try {
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw Error(ErrorCode::Parse, "override must be key=value: " + kv);
            c.overrides[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        }
        if (!t_range.empty()) {
            std::stringstream ss(t_range);
            std::string a, b, n;
            if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, n, ','))
                throw Error(ErrorCode::Parse, "t-range must be start,stop,steps");
            c.t_start = std::stod(a);
            c.t_stop = std::stod(b);
            c.t_steps = std::stoi(n);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: bad numeric value (" << e.what() << ")\n";
        return 2;
    }
    return run(c, std::cout, std::cerr);
}

}  // namespace sip
