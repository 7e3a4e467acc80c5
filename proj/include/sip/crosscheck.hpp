#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sip/master_catalog.hpp"

namespace sip {

// One comparison between a printed formula and the direct evaluation.
struct Finding {
    std::string preset;
    std::string column;
    std::string printed_text;
    int n = 0, m = 0;
    std::optional<double> printed;   // value of the printed formula
    std::optional<double> computed;  // value from the general construction
    double difference = 0.0;         // |printed - computed|, or the defect norm
    bool agrees = false;
    std::string note;
};

struct CrosscheckOptions {
    int levels = 3;
    int nmax = 10;
    int npoints = 200;
    double k0 = 0.3;
    double t = 0.3;
    double tol = 1e-8;
};

std::vector<Finding> crosscheck(const MasterSpec& spec, const CrosscheckOptions& opt = {});
nlohmann::json findings_json(const std::vector<Finding>& rows);

}  // namespace sip
