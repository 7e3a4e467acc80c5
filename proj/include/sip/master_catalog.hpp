#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sip/errors.hpp"
#include "sip/polynomial.hpp"

namespace sip {

enum class WeightKind { Gaussian, PowerExp, PowerInvExp, PowerArctan, Binomial };

const char* to_string(WeightKind k);
WeightKind weight_kind_from_string(const std::string& s);

// Closed-form weight families of the catalog.
//   gaussian       exp(-alpha x^2 / 2)                (b: coordinate offset only)
//   power_exp      x^alpha exp(-beta x)
//   power_inv_exp  x^alpha exp(-beta / x)
//   power_arctan   (1 + x^2)^alpha exp(beta atan x)
//   binomial       (u0 + u1 x)^alpha (v0 + v1 x)^beta
struct WeightFamily {
    WeightKind kind = WeightKind::Gaussian;
    std::map<std::string, double> params;

    double param(const std::string& key, double fallback = 0.0) const;
    double log_value(double x) const;
    // W'/W
    double dlog(double x) const;
    // Power of x that W behaves like at +-infinity, when the decay is algebraic.
    std::optional<double> tail_exponent() const;
    bool operator==(const WeightFamily&) const = default;
};

struct MasterSpec {
    std::string name;
    std::array<double, 3> a_coeffs{1.0, 0.0, 0.0};
    WeightFamily weight;
    double a = 0.0;
    double b = 0.0;
    double gamma_shift = 0.0;
    double mass = 0.5;

    Poly A() const { return Poly({a_coeffs[0], a_coeffs[1], a_coeffs[2]}); }
    double A_at(double x) const { return a_coeffs[0] + x * (a_coeffs[1] + x * a_coeffs[2]); }
    double dA_at(double x) const { return a_coeffs[1] + 2.0 * a_coeffs[2] * x; }
    double A2() const { return 2.0 * a_coeffs[2]; }
    int degree_A() const;
    bool contains(double x) const { return x > a && x < b; }
    bool operator==(const MasterSpec&) const = default;
};

// s(x) = A W'/W, linear for admissible specs.
struct DriftLine {
    double C = 0.0;   // s(0)
    double A1 = 0.0;  // s'
};

DriftLine drift_line(const MasterSpec& spec);
double drift_at(const MasterSpec& spec, double x);

// Reference formula columns carried by a preset, used only for cross-checks.
struct ReferenceRecord {
    std::string row_name;
    std::string x_of_t;
    std::string mu_text;
    std::string energy_text;
    std::string omega_text;
    std::string g_text;
    std::string an_text;
    std::function<double(int n, int m)> mu;
    std::function<double(int n, int m)> energy;
    std::function<double(double E, int m)> omega_c;
    // G column; functions of x (through t) or of the energy for the 3D oscillator
    std::function<double(double x, double E, int m, double x0, double p0)> g;
    // log|a_n/a_0| and its sign, for complex k0 only the modulus of k0 is used
    std::function<double(int n, int m, double k0, int* sign)> log_an_ratio;
};

struct ValidationCheck {
    std::string name;
    bool passed = true;
    std::string detail;
    std::optional<ErrorCode> code;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool ok() const;
    std::optional<ErrorCode> first_error() const;
};

ValidationReport validate(const MasterSpec& spec);
// Throws sip::Error with the first failing code.
void require_valid(const MasterSpec& spec);

const std::vector<std::string>& preset_names();
MasterSpec preset(const std::string& name);
MasterSpec preset(const std::string& name, const std::map<std::string, double>& overrides);
std::optional<ReferenceRecord> reference_record(const MasterSpec& spec);

// Largest n with a finite norm in sector m (a large sentinel if unbounded).
int max_normalizable_n(const MasterSpec& spec, int m);
constexpr int kUnbounded = 1 << 20;

// xi(x) = integral dx / sqrt(A)
double coordinate_map(const MasterSpec& spec, double x);

nlohmann::json spec_json(const MasterSpec& spec);
std::string spec_to_json(const MasterSpec& spec);
MasterSpec spec_from_json(const std::string& text);
MasterSpec load_spec(const std::string& path);

}  // namespace sip
