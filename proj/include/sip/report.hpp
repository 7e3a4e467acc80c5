#pragma once

#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

namespace sip {

// Canonical JSON text: keys sorted, doubles with 17 significant digits,
// non-finite numbers as strings.
std::string dump_json(const nlohmann::json& j, int indent = 2);

std::string format_double(double v);

nlohmann::json num_json(double v);
nlohmann::json complex_json(std::complex<double> z);
nlohmann::json vector_json(const std::vector<double>& v);

}  // namespace sip
