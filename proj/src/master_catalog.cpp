#include "sip/master_catalog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "sip/report.hpp"

namespace sip {

const char* to_string(ErrorCode c) {
    switch (c) {
        case ErrorCode::NonPositiveA: return "NonPositiveA";
        case ErrorCode::WeightNotVanishing: return "WeightNotVanishing";
        case ErrorCode::DegreeViolation: return "DegreeViolation";
        case ErrorCode::ParameterRange: return "ParameterRange";
        case ErrorCode::UnknownPreset: return "UnknownPreset";
        case ErrorCode::IntervalDegenerate: return "IntervalDegenerate";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::NormDiverges: return "NormDiverges";
        case ErrorCode::BadQuantumNumbers: return "BadQuantumNumbers";
        case ErrorCode::MapNotMonotone: return "MapNotMonotone";
        case ErrorCode::OutOfInterval: return "OutOfInterval";
        case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
        case ErrorCode::NonOscillatory: return "NonOscillatory";
        case ErrorCode::DivergentRecursion: return "DivergentRecursion";
        case ErrorCode::ZeroDenominator: return "ZeroDenominator";
        case ErrorCode::ZeroEnergyDivision: return "ZeroEnergyDivision";
        case ErrorCode::ParityUnavailable: return "ParityUnavailable";
        case ErrorCode::DivergentSeries: return "DivergentSeries";
        case ErrorCode::BasisMismatch: return "BasisMismatch";
        case ErrorCode::Parse: return "Parse";
    }
    return "Unknown";
}

bool is_validation_error(ErrorCode c) {
    switch (c) {
        case ErrorCode::NonPositiveA:
        case ErrorCode::WeightNotVanishing:
        case ErrorCode::DegreeViolation:
        case ErrorCode::ParameterRange:
        case ErrorCode::UnknownPreset:
        case ErrorCode::IntervalDegenerate:
        case ErrorCode::BadQuantumNumbers:
        case ErrorCode::OutOfInterval:
        case ErrorCode::TruncationTooSmall:
        case ErrorCode::ParityUnavailable:
        case ErrorCode::BasisMismatch:
        case ErrorCode::Parse:
            return true;
        default:
            return false;
    }
}

const char* to_string(WeightKind k) {
    switch (k) {
        case WeightKind::Gaussian: return "gaussian";
        case WeightKind::PowerExp: return "power_exp";
        case WeightKind::PowerInvExp: return "power_inv_exp";
        case WeightKind::PowerArctan: return "power_arctan";
        case WeightKind::Binomial: return "binomial";
    }
    return "gaussian";
}

WeightKind weight_kind_from_string(const std::string& s) {
    for (auto k : {WeightKind::Gaussian, WeightKind::PowerExp, WeightKind::PowerInvExp,
                   WeightKind::PowerArctan, WeightKind::Binomial})
        if (s == to_string(k)) return k;
    throw Error(ErrorCode::Parse, "unknown weight family '" + s + "'");
}

double WeightFamily::param(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

double WeightFamily::log_value(double x) const {
    const double al = param("alpha"), be = param("beta");
    switch (kind) {
        case WeightKind::Gaussian: return -0.5 * al * x * x;
        case WeightKind::PowerExp: return al * std::log(x) - be * x;
        case WeightKind::PowerInvExp: return al * std::log(x) - be / x;
        case WeightKind::PowerArctan: return al * std::log1p(x * x) + be * std::atan(x);
        case WeightKind::Binomial: {
            const double u = param("u0") + param("u1") * x;
            const double v = param("v0") + param("v1") * x;
            double r = 0.0;
            if (al != 0.0) r += al * std::log(u);
            if (be != 0.0) r += be * std::log(v);
            return r;
        }
    }
    return 0.0;
}

double WeightFamily::dlog(double x) const {
    const double al = param("alpha"), be = param("beta");
    switch (kind) {
        case WeightKind::Gaussian: return -al * x;
        case WeightKind::PowerExp: return al / x - be;
        case WeightKind::PowerInvExp: return al / x + be / (x * x);
        case WeightKind::PowerArctan: return (2.0 * al * x + be) / (1.0 + x * x);
        case WeightKind::Binomial: {
            double r = 0.0;
            if (al != 0.0) r += al * param("u1") / (param("u0") + param("u1") * x);
            if (be != 0.0) r += be * param("v1") / (param("v0") + param("v1") * x);
            return r;
        }
    }
    return 0.0;
}

std::optional<double> WeightFamily::tail_exponent() const {
    const double al = param("alpha"), be = param("beta");
    switch (kind) {
        case WeightKind::Gaussian:
        case WeightKind::PowerExp:
            return std::nullopt;
        case WeightKind::PowerInvExp: return al;
        case WeightKind::PowerArctan: return 2.0 * al;
        case WeightKind::Binomial: {
            double t = 0.0;
            if (param("u1") != 0.0) t += al;
            if (param("v1") != 0.0) t += be;
            return t;
        }
    }
    return std::nullopt;
}

int MasterSpec::degree_A() const {
    if (a_coeffs[2] != 0.0) return 2;
    if (a_coeffs[1] != 0.0) return 1;
    return 0;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Deterministic interior sample points.
std::vector<double> interior_points(const MasterSpec& s, int count, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> uni(0.1, 0.9);
    std::vector<double> pts;
    for (int i = 0; i < count; ++i) {
        const double u = uni(gen);
        double x;
        if (std::isfinite(s.a) && std::isfinite(s.b)) x = s.a + u * (s.b - s.a);
        else if (std::isfinite(s.a)) x = s.a + 4.0 * u / (1.0 - u);
        else if (std::isfinite(s.b)) x = s.b - 4.0 * u / (1.0 - u);
        else x = 6.0 * (u - 0.5);
        pts.push_back(x);
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

// Least-squares line through (x_i, y_i); returns {c0, c1, relative residual}.
std::array<double, 3> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    const double c1 = (n * sxy - sx * sy) / det;
    const double c0 = (sy - c1 * sx) / n;
    double res = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double line = c0 + c1 * x[i];
        res = std::max(res, std::abs(y[i] - line));
        scale = std::max(scale, std::abs(line));
    }
    return {c0, c1, scale > 0 ? res / scale : res};
}

}  // namespace

DriftLine drift_line(const MasterSpec& spec) {
    auto pts = interior_points(spec, 5, 7u);
    std::vector<double> y;
    for (double x : pts) y.push_back(spec.A_at(x) * spec.weight.dlog(x));
    auto f = fit_line(pts, y);
    return {f[0], f[1]};
}

double drift_at(const MasterSpec& spec, double x) { return spec.A_at(x) * spec.weight.dlog(x); }

bool ValidationReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::optional<ErrorCode> ValidationReport::first_error() const {
    for (const auto& c : checks)
        if (!c.passed) return c.code;
    return std::nullopt;
}

namespace {

struct Range {
    std::string what;
    std::function<bool(double, double)> ok;
};

std::optional<Range> preset_range(const std::string& name) {
    if (name == "shifted_oscillator") return Range{"alpha > 0", [](double a, double) { return a > 0; }};
    if (name == "three_dim_oscillator")
        return Range{"alpha > -1, beta > 0", [](double a, double b) { return a > -1 && b > 0; }};
    if (name == "morse")
        return Range{"alpha < -2, beta > 0", [](double a, double b) { return a < -2 && b > 0; }};
    if (name == "scarf2_hyperbolic") return Range{"alpha < -1", [](double a, double) { return a < -1; }};
    if (name == "scarf1_trigonometric" || name == "row7_trigonometric")
        return Range{"alpha, beta > -1", [](double a, double b) { return a > -1 && b > -1; }};
    if (name == "gen_poschl_teller" || name == "natanzon")
        return Range{"alpha > -1, alpha + beta < -1",
                     [](double a, double b) { return a > -1 && a + b < -1; }};
    return std::nullopt;
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

ValidationReport validate(const MasterSpec& spec) {
    ValidationReport rep;
    auto add = [&](std::string name, bool ok, std::string detail, ErrorCode code) {
        ValidationCheck c{std::move(name), ok, std::move(detail), std::nullopt};
        if (!ok) c.code = code;
        rep.checks.push_back(std::move(c));
    };

    if (!(spec.a < spec.b) || std::isnan(spec.a) || std::isnan(spec.b)) {
        add("interval", false, "a >= b", ErrorCode::IntervalDegenerate);
        return rep;
    }
    add("interval", true, "", ErrorCode::IntervalDegenerate);

    // A > 0 inside: no real root strictly inside, and positive somewhere inside.
    {
        const double c0 = spec.a_coeffs[0], c1 = spec.a_coeffs[1], c2 = spec.a_coeffs[2];
        std::vector<double> roots;
        if (c2 != 0.0) {
            const double d = c1 * c1 - 4 * c2 * c0;
            if (d >= 0) {
                roots.push_back((-c1 - std::sqrt(d)) / (2 * c2));
                roots.push_back((-c1 + std::sqrt(d)) / (2 * c2));
            }
        } else if (c1 != 0.0) {
            roots.push_back(-c0 / c1);
        }
        bool ok = true;
        std::string detail;
        for (double r : roots)
            if (spec.contains(r)) {
                ok = false;
                detail = "A vanishes at x=" + num(r);
            }
        const double probe = interior_points(spec, 1, 3u)[0];
        if (ok && !(spec.A_at(probe) > 0)) {
            ok = false;
            detail = "A(" + num(probe) + ")=" + num(spec.A_at(probe));
        }
        add("A_positive", ok, detail, ErrorCode::NonPositiveA);
        if (!ok) return rep;
    }

    auto pts = interior_points(spec, 5, 11u);
    {
        bool ok = true;
        std::string detail;
        for (double x : pts)
            if (!std::isfinite(spec.weight.log_value(x))) {
                ok = false;
                detail = "W undefined at x=" + num(x);
            }
        add("weight_defined", ok, detail, ErrorCode::WeightNotVanishing);
        if (!ok) return rep;
    }

    // A W -> 0 monotonically along geometric sequences towards each endpoint.
    for (int side = 0; side < 2; ++side) {
        const double end = side == 0 ? spec.a : spec.b;
        std::vector<double> logs;
        for (int k = 1; k <= 6; ++k) {
            double x;
            const double step = std::pow(10.0, -k);
            if (std::isfinite(end)) {
                const double other = side == 0 ? spec.b : spec.a;
                const double width = std::isfinite(other) ? std::abs(other - end) : 0.1;
                x = side == 0 ? end + step * width : end - step * width;
            } else {
                x = side == 0 ? -std::pow(10.0, k) : std::pow(10.0, k);
            }
            logs.push_back(std::log(std::abs(spec.A_at(x))) + spec.weight.log_value(x));
        }
        bool ok = true;
        for (std::size_t i = 1; i < logs.size(); ++i)
            if (!(logs[i] < logs[i - 1]) && !(std::isinf(logs[i]) && logs[i] < 0)) ok = false;
        std::string detail = "log|AW| at k=1..6:";
        for (double l : logs) detail += " " + num(l);
        add(side == 0 ? "AW_vanishes_left" : "AW_vanishes_right", ok, ok ? "" : detail,
            ErrorCode::WeightNotVanishing);
    }

    // (AW)'/W = A' + A W'/W must be a line.
    {
        auto dpts = interior_points(spec, 5, 13u);
        std::vector<double> y;
        for (double x : dpts) y.push_back(spec.dA_at(x) + drift_at(spec, x));
        auto f = fit_line(dpts, y);
        const bool ok = f[2] < 1e-10;
        add("degree_le_1", ok, "relative line residual " + num(f[2]), ErrorCode::DegreeViolation);
    }

    if (auto r = preset_range(spec.name)) {
        const double al = spec.weight.param("alpha"), be = spec.weight.param("beta");
        const bool ok = r->ok(al, be);
        add("parameter_range", ok, ok ? "" : "requires " + r->what + ", got alpha=" + num(al) + " beta=" + num(be),
            ErrorCode::ParameterRange);
    }
    return rep;
}

void require_valid(const MasterSpec& spec) {
    auto rep = validate(spec);
    if (rep.ok()) return;
    for (const auto& c : rep.checks)
        if (!c.passed) throw Error(*c.code, spec.name + ": " + c.name + " " + c.detail);
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {
        "shifted_oscillator", "three_dim_oscillator", "morse",
        "scarf2_hyperbolic",  "scarf1_trigonometric", "gen_poschl_teller",
        "row7_trigonometric", "natanzon"};
    return names;
}

namespace {

WeightFamily binomial(double al, double be, double u0, double u1, double v0, double v1) {
    return {WeightKind::Binomial,
            {{"alpha", al}, {"beta", be}, {"u0", u0}, {"u1", u1}, {"v0", v0}, {"v1", v1}}};
}

double jacobi_root(int n, double a, double b) {
    return std::sqrt((n + a) * (n + b) * (2 * n + a + b - 1) / (n * (n + a + b) * (2 * n + a + b + 1)));
}

double log_jacobi_an(int n, double a, double b, int* sign) {
    // Gamma(n+(a+b)/2) sqrt(Gamma(n+(a+b-1)/2)/Gamma(n+(a+b+1)/2))
    //   / sqrt(Gamma(n+1) Gamma(n+a+1) Gamma(n+b+1) Gamma(n+a+b+1))
    int s1, s2, s3, s4, s5, s6, s7;
    double l = lgamma_r(n + 0.5 * (a + b), &s1);
    l += 0.5 * (lgamma_r(n + 0.5 * (a + b - 1), &s2) - lgamma_r(n + 0.5 * (a + b + 1), &s3));
    l -= 0.5 * (lgamma_r(n + 1.0, &s4) + lgamma_r(n + a + 1, &s5) + lgamma_r(n + b + 1, &s6) +
                lgamma_r(n + a + b + 1, &s7));
    *sign = s1;
    if (s2 * s3 < 0 || s4 * s5 * s6 * s7 < 0) return std::numeric_limits<double>::quiet_NaN();
    return l;
}

double log_ratio(double logn, double log0, int sn, int s0, int* sign) {
    *sign = sn * s0;
    return logn - log0;
}

}  // namespace

MasterSpec preset(const std::string& name) { return preset(name, {}); }

MasterSpec preset(const std::string& name, const std::map<std::string, double>& overrides) {
    MasterSpec s;
    s.name = name;
    auto get = [&](const std::string& k, double d) {
        auto it = overrides.find(k);
        return it == overrides.end() ? d : it->second;
    };
    if (name == "shifted_oscillator") {
        s.a_coeffs = {1, 0, 0};
        s.weight = {WeightKind::Gaussian, {{"alpha", get("alpha", 1.0)}, {"b", get("b", 0.0)}}};
        s.a = -kInf; s.b = kInf;
    } else if (name == "three_dim_oscillator") {
        s.a_coeffs = {0, 1, 0};
        s.weight = {WeightKind::PowerExp, {{"alpha", get("alpha", 1.0)}, {"beta", get("beta", 1.0)}}};
        s.a = 0; s.b = kInf;
    } else if (name == "morse") {
        s.a_coeffs = {0, 0, 1};
        s.weight = {WeightKind::PowerInvExp, {{"alpha", get("alpha", -40.0)}, {"beta", get("beta", 1.0)}}};
        s.a = 0; s.b = kInf;
    } else if (name == "scarf2_hyperbolic") {
        s.a_coeffs = {1, 0, 1};
        s.weight = {WeightKind::PowerArctan, {{"alpha", get("alpha", -25.0)}, {"beta", get("beta", 1.0)}}};
        s.a = -kInf; s.b = kInf;
    } else if (name == "scarf1_trigonometric") {
        s.a_coeffs = {0, 1, -1};
        s.weight = binomial(get("alpha", 1.0), get("beta", 1.0), 0, 1, 1, -1);
        s.a = 0; s.b = 1;
    } else if (name == "gen_poschl_teller") {
        s.a_coeffs = {-1, 0, 1};
        s.weight = binomial(get("alpha", 1.0), get("beta", -60.0), -1, 1, 1, 1);
        s.a = 1; s.b = kInf;
    } else if (name == "row7_trigonometric") {
        s.a_coeffs = {1, 0, -1};
        s.weight = binomial(get("alpha", 1.0), get("beta", 1.0), 1, -1, 1, 1);
        s.a = -1; s.b = 1;
    } else if (name == "natanzon") {
        s.a_coeffs = {-1, 0, 4};
        s.weight = binomial(get("alpha", 1.0), get("beta", -60.0), -1, 2, 1, 2);
        s.a = 0.5; s.b = kInf;
    } else {
        throw Error(ErrorCode::UnknownPreset, "'" + name + "'");
    }
    return s;
}

std::optional<ReferenceRecord> reference_record(const MasterSpec& spec) {
    const auto& names = preset_names();
    if (std::find(names.begin(), names.end(), spec.name) == names.end()) return std::nullopt;
    const double al = spec.weight.param("alpha"), be = spec.weight.param("beta");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    ReferenceRecord r;
    r.row_name = spec.name;
    const std::string& nm = spec.name;
    auto jac_an = [al, be](double pref, int n, int m, double k0, int* sign) {
        (void)m;
        int sn, s0;
        double ln = log_jacobi_an(n, al, be, &sn), l0 = log_jacobi_an(0, al, be, &s0);
        double l = log_ratio(ln, l0, sn, s0, sign);
        if (pref != 0.0) {
            const double base = pref * k0;
            if (base < 0 && n % 2) *sign = -*sign;
            l += n * std::log(std::abs(base));
        }
        return l;
    };
    if (nm == "shifted_oscillator") {
        r.x_of_t = "x = t - 2b/alpha";
        r.mu_text = "(n-m)/n sqrt(n)";
        r.energy_text = "alpha(n-m+1)";
        r.omega_text = "omega_c = alpha";
        r.g_text = "x0 p0";
        r.an_text = "(k0/alpha)^n / sqrt(Gamma(n+1))";
        r.mu = [](int n, int m) { return double(n - m) / n * std::sqrt(double(n)); };
        r.energy = [al](int n, int m) { return al * (n - m + 1); };
        r.omega_c = [al](double, int) { return al; };
        r.g = [](double, double, int, double x0, double p0) { return x0 * p0; };
        r.log_an_ratio = [al](int n, int, double k0, int* sign) {
            *sign = (k0 / al < 0 && n % 2) ? -1 : 1;
            return n * std::log(std::abs(k0 / al)) - 0.5 * std::lgamma(n + 1.0);
        };
    } else if (nm == "three_dim_oscillator") {
        r.x_of_t = "x = t^2/4";
        r.mu_text = "-(n-m) sqrt((n+alpha)/n)";
        r.energy_text = "beta(n-m+1)";
        r.omega_text = "omega_c = beta";
        r.g_text = "(x0 p0 (alpha+m-1/2)/beta)(1 + 2H/((alpha+m-1)beta))";
        r.an_text = "(-k0)^n / sqrt(Gamma(n+1) Gamma(n+alpha+1))";
        r.mu = [al](int n, int m) { return -(n - m) * std::sqrt((n + al) / n); };
        r.energy = [be](int n, int m) { return be * (n - m + 1); };
        r.omega_c = [be](double, int) { return be; };
        r.g = [al, be](double, double E, int m, double x0, double p0) {
            return x0 * p0 * (al + m - 0.5) / be * (1.0 + 2.0 * E / ((al + m - 1.0) * be));
        };
        r.log_an_ratio = [al](int n, int, double k0, int* sign) {
            *sign = (-k0 < 0 && n % 2) ? -1 : 1;
            return n * std::log(std::abs(k0)) -
                   0.5 * (std::lgamma(n + 1.0) + std::lgamma(n + al + 1) - std::lgamma(al + 1));
        };
    } else if (nm == "morse") {
        r.x_of_t = "x = e^t";
        r.mu_text = "-(n+m)(n+alpha)/(2n+alpha) sqrt((n+alpha)/n)";
        r.energy_text = "-(alpha+n+m)(n-m+1)";
        r.omega_text = "2 sqrt(alpha^2/4 + (4m^2-1)/8 - E)";
        r.g_text = "x0 p0 e^{2t}";
        r.an_text = "(2k0)^n Gamma(n+alpha/2+1) sqrt(Gamma(n+alpha+1)/Gamma(n+1))";
        r.mu = [al](int n, int m) { return -(n + m) * (n + al) / (2 * n + al) * std::sqrt((n + al) / n); };
        r.energy = [al](int n, int m) { return -(al + n + m) * (n - m + 1); };
        r.omega_c = [al](double E, int m) {
            return 2.0 * std::sqrt(al * al / 4 + (4.0 * m * m - 1) / 8 - E);
        };
        r.g = [](double x, double, int, double x0, double p0) { return x0 * p0 * x * x; };
        r.log_an_ratio = [al, nan](int n, int, double k0, int* sign) {
            int s1, s2, s3, t1, t2;
            double l = lgamma_r(n + al / 2 + 1, &s1) + 0.5 * (lgamma_r(n + al + 1, &s2) - lgamma_r(n + 1.0, &s3));
            double l0 = lgamma_r(al / 2 + 1, &t1) + 0.5 * lgamma_r(al + 1, &t2);
            if (s2 < 0 || t2 < 0) return nan;
            *sign = s1 * t1 * ((2 * k0 < 0 && n % 2) ? -1 : 1);
            return l - l0 + n * std::log(std::abs(2 * k0));
        };
    } else if (nm == "scarf2_hyperbolic") {
        r.x_of_t = "x = sinh t";
        r.mu_text = "(n-m)(n+2alpha)/(2n+2alpha) sqrt((2m-1)/2)";
        r.energy_text = "-(2alpha+n+m)(n-m+1)";
        r.omega_text = "2 sqrt(s1+s2), s1 = alpha^2+(4m^2-1)/8, s2 = (2m-1)(alpha-1/2)-E";
        r.g_text = "x0 p0 cosh^2 t";
        r.an_text = "(2k0)^n Gamma(n+2alpha+1)/(Gamma(n+alpha+1) Gamma(n+m+2alpha))";
        r.mu = [al](int n, int m) {
            return (n - m) * (n + 2 * al) / (2 * n + 2 * al) * std::sqrt((2.0 * m - 1) / 2);
        };
        r.energy = [al](int n, int m) { return -(2 * al + n + m) * (n - m + 1); };
        r.omega_c = [al](double E, int m) {
            const double s1 = al * al + (4.0 * m * m - 1) / 8, s2 = (2.0 * m - 1) * (al - 0.5) - E;
            return 2.0 * std::sqrt(s1 + s2);
        };
        r.g = [](double x, double, int, double x0, double p0) { return x0 * p0 * (1 + x * x); };
        r.log_an_ratio = [al](int n, int m, double k0, int* sign) {
            int s1, s2, s3, t1, t2, t3;
            double l = lgamma_r(n + 2 * al + 1, &s1) - lgamma_r(n + al + 1, &s2) - lgamma_r(n + m + 2 * al, &s3);
            double l0 = lgamma_r(2 * al + 1, &t1) - lgamma_r(al + 1, &t2) - lgamma_r(m + 2 * al, &t3);
            *sign = s1 * s2 * s3 * t1 * t2 * t3 * ((2 * k0 < 0 && n % 2) ? -1 : 1);
            return l - l0 + n * std::log(std::abs(2 * k0));
        };
    } else if (nm == "scarf1_trigonometric") {
        r.x_of_t = "x = (1 + sin t)/2";
        r.mu_text = "-n(n+alpha+beta)/(2n+alpha+beta) sqrt(...)";
        r.energy_text = "(alpha+beta+n+m)(n-m+1)";
        r.omega_text = "2 sqrt(s1+s2+s3), s1=(alpha+beta)^2/4, s2=(m-1/2)(alpha+beta-1), s3=-(4m^2-1)/8+E";
        r.g_text = "x0 p0 cos^2 t";
        r.an_text = "(-2k0)^n Gamma(n+(alpha+beta)/2) sqrt(...)";
        r.mu = [al, be](int n, int) { return -n * (n + al + be) / (2 * n + al + be) * jacobi_root(n, al, be); };
        r.energy = [al, be](int n, int m) { return (al + be + n + m) * (n - m + 1); };
        r.omega_c = [al, be](double E, int m) {
            const double s1 = (al + be) * (al + be) / 4, s2 = (m - 0.5) * (al + be - 1),
                         s3 = -(4.0 * m * m - 1) / 8 + E;
            return 2.0 * std::sqrt(s1 + s2 + s3);
        };
        // x = (1 + sin t)/2 gives cos^2 t = 4 x (1 - x)
        r.g = [](double x, double, int, double x0, double p0) { return x0 * p0 * 4 * x * (1 - x); };
        r.log_an_ratio = [jac_an](int n, int m, double k0, int* s) { return jac_an(-2.0, n, m, k0, s); };
    } else if (nm == "gen_poschl_teller") {
        r.x_of_t = "x = cosh t";
        r.mu_text = "2n(n+alpha+beta)/(2n+alpha+beta) sqrt(...)";
        r.energy_text = "-(alpha+beta+n+m)(n-m+1)";
        r.omega_text = "2 sqrt(s1+s2+s3), s1=(alpha+beta)^2/4, s2=(4m^2-1)/8-E, s3=(2m-1)/2 (alpha+beta-1)";
        r.g_text = "x0 p0 sinh^2 t";
        r.an_text = "Gamma(n+(alpha+beta)/2) sqrt(...)";
        r.mu = [al, be](int n, int) { return 2.0 * n * (n + al + be) / (2 * n + al + be) * jacobi_root(n, al, be); };
        r.energy = [al, be](int n, int m) { return -(al + be + n + m) * (n - m + 1); };
        r.omega_c = [al, be](double E, int m) {
            const double s1 = (al + be) * (al + be) / 4, s2 = (4.0 * m * m - 1) / 8 - E,
                         s3 = (2.0 * m - 1) / 2 * (al + be - 1);
            return 2.0 * std::sqrt(s1 + s2 + s3);
        };
        r.g = [](double x, double, int, double x0, double p0) { return x0 * p0 * (x * x - 1); };
        r.log_an_ratio = [jac_an](int n, int m, double k0, int* s) { return jac_an(0.0, n, m, k0, s); };
    } else if (nm == "row7_trigonometric") {
        r.x_of_t = "x = cos t";
        r.mu_text = "2 n(n+alpha+beta)/(2n+alpha+beta) sqrt(...)";
        r.energy_text = "(alpha+beta+n+m)(n-m+1)";
        r.omega_text = "2 sqrt(s1+s2+s3), s1=(alpha+beta)^2/4, s2=E-(4m^2-1)/8, s3=(2m-1)/2 (alpha+beta-1)";
        r.g_text = "x0 p0 sin^2 t";
        r.an_text = "(2k0)^n Gamma(n+(alpha+beta)/2) sqrt(...)";
        r.mu = [al, be](int n, int) { return 2.0 * n * (n + al + be) / (2 * n + al + be) * jacobi_root(n, al, be); };
        r.energy = [al, be](int n, int m) { return (al + be + n + m) * (n - m + 1); };
        r.omega_c = [al, be](double E, int m) {
            const double s1 = (al + be) * (al + be) / 4, s2 = E - (4.0 * m * m - 1) / 8,
                         s3 = (2.0 * m - 1) / 2 * (al + be - 1);
            return 2.0 * std::sqrt(s1 + s2 + s3);
        };
        r.g = [](double x, double, int, double x0, double p0) { return x0 * p0 * (1 - x * x); };
        r.log_an_ratio = [jac_an](int n, int m, double k0, int* s) { return jac_an(2.0, n, m, k0, s); };
    } else if (nm == "natanzon") {
        r.x_of_t = "x = cosh(2t)/2";
        r.mu_text = "2n(n+alpha+beta)/(2n+alpha+beta) sqrt(...)";
        r.energy_text = "-4(alpha+beta+n+m)(n-m+1)";
        r.omega_text = "4 sqrt(s1+s2+s3), s1=(alpha+beta)^2, s2=(4m^2-1)/8-E, s3=2(2m-1)(alpha+beta-1)";
        r.g_text = "x0 p0 sinh^2(2t)";
        r.an_text = "(k0/4)^n Gamma(n+(alpha+beta)/2) sqrt(...)";
        r.mu = [al, be](int n, int) { return 2.0 * n * (n + al + be) / (2 * n + al + be) * jacobi_root(n, al, be); };
        r.energy = [al, be](int n, int m) { return -4 * (al + be + n + m) * (n - m + 1); };
        r.omega_c = [al, be](double E, int m) {
            const double s1 = (al + be) * (al + be), s2 = (4.0 * m * m - 1) / 8 - E,
                         s3 = 2 * (2.0 * m - 1) * (al + be - 1);
            return 4.0 * std::sqrt(s1 + s2 + s3);
        };
        r.g = [](double x, double, int, double x0, double p0) { return x0 * p0 * (4 * x * x - 1); };
        r.log_an_ratio = [jac_an](int n, int m, double k0, int* s) { return jac_an(0.25, n, m, k0, s); };
    }
    return r;
}

int max_normalizable_n(const MasterSpec& spec, int m) {
    if (std::isfinite(spec.a) && std::isfinite(spec.b)) return kUnbounded;
    auto tail = spec.weight.tail_exponent();
    if (!tail) return kUnbounded;
    // W A^m p^2 ~ x^(tail + m deg A + 2(n-m)) must decay faster than 1/x
    const double bound = (-1.0 - *tail - m * spec.degree_A()) / 2.0 + m;
    int n = static_cast<int>(std::ceil(bound)) - 1;
    return n;
}

double coordinate_map(const MasterSpec& spec, double x) {
    if (!spec.contains(x)) throw Error(ErrorCode::OutOfInterval, "x=" + num(x));
    const std::string& nm = spec.name;
    if (nm == "shifted_oscillator") {
        const double al = spec.weight.param("alpha"), bb = spec.weight.param("b");
        return x + 2.0 * bb / al;
    }
    if (nm == "three_dim_oscillator") return 2.0 * std::sqrt(x);
    if (nm == "morse") return std::log(x);
    if (nm == "scarf2_hyperbolic") return std::asinh(x);
    if (nm == "scarf1_trigonometric") return std::asin(2.0 * x - 1.0);
    if (nm == "gen_poschl_teller") return std::acosh(x);
    if (nm == "row7_trigonometric") return std::asin(x);
    if (nm == "natanzon") return 0.5 * std::acosh(2.0 * x);

    // General antiderivative of 1/sqrt(c0 + c1 x + c2 x^2), zeroed at a reference point.
    const double c0 = spec.a_coeffs[0], c1 = spec.a_coeffs[1], c2 = spec.a_coeffs[2];
    auto F = [&](double y) {
        if (c2 == 0.0 && c1 == 0.0) return y / std::sqrt(c0);
        if (c2 == 0.0) return 2.0 * std::sqrt(c0 + c1 * y) / c1;
        if (c2 > 0.0) {
            const double Ay = c0 + c1 * y + c2 * y * y;
            return std::log(std::abs(2.0 * std::sqrt(c2 * Ay) + 2.0 * c2 * y + c1)) / std::sqrt(c2);
        }
        const double disc = std::sqrt(c1 * c1 - 4.0 * c0 * c2);
        return std::asin(std::clamp(-(2.0 * c2 * y + c1) / disc, -1.0, 1.0)) / std::sqrt(-c2);
    };
    double ref;
    if (std::isfinite(spec.a) && std::isfinite(spec.b)) ref = 0.5 * (spec.a + spec.b);
    else if (std::isfinite(spec.a)) ref = spec.a + 1.0;
    else if (std::isfinite(spec.b)) ref = spec.b - 1.0;
    else ref = 0.0;
    return F(x) - F(ref);
}

namespace {

nlohmann::json endpoint_json(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double endpoint_value(const nlohmann::json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
        throw Error(ErrorCode::Parse, "bad endpoint '" + s + "'");
    }
    return j.get<double>();
}

}  // namespace

nlohmann::json spec_json(const MasterSpec& s) {
    nlohmann::json j;
    j["name"] = s.name;
    j["a_coeffs"] = {s.a_coeffs[0], s.a_coeffs[1], s.a_coeffs[2]};
    nlohmann::json w;
    w["family"] = to_string(s.weight.kind);
    w["params"] = nlohmann::json::object();
    for (const auto& [k, v] : s.weight.params) w["params"][k] = v;
    j["weight"] = w;
    j["interval"] = {endpoint_json(s.a), endpoint_json(s.b)};
    j["gamma_shift"] = s.gamma_shift;
    j["mass"] = s.mass;
    return j;
}

std::string spec_to_json(const MasterSpec& spec) { return dump_json(spec_json(spec), 2); }

MasterSpec spec_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // byte offset -> line number
        std::size_t line = 1;
        for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
            if (text[i] == '\n') ++line;
        throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": " + e.what());
    }
    try {
        MasterSpec s;
        s.name = j.value("name", std::string("custom"));
        const auto& ac = j.at("a_coeffs");
        if (!ac.is_array() || ac.size() != 3) throw Error(ErrorCode::Parse, "a_coeffs needs 3 numbers");
        for (int k = 0; k < 3; ++k) s.a_coeffs[k] = ac[k].get<double>();
        const auto& w = j.at("weight");
        s.weight.kind = weight_kind_from_string(w.at("family").get<std::string>());
        if (w.contains("params"))
            for (auto it = w["params"].begin(); it != w["params"].end(); ++it)
                s.weight.params[it.key()] = it.value().get<double>();
        const auto& iv = j.at("interval");
        if (!iv.is_array() || iv.size() != 2) throw Error(ErrorCode::Parse, "interval needs 2 endpoints");
        s.a = endpoint_value(iv[0]);
        s.b = endpoint_value(iv[1]);
        s.gamma_shift = j.value("gamma_shift", 0.0);
        s.mass = j.value("mass", 0.5);
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, e.what());
    }
}

MasterSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Parse, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return spec_from_json(ss.str());
    } catch (const Error& e) {
        throw Error(ErrorCode::Parse, path + ": " + e.what());
    }
}

}  // namespace sip
