#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace sip {

struct RunConfig {
    std::string subcommand;
    std::string spec_path;
    std::string preset;
    std::map<std::string, double> overrides;  // preset parameters
    bool all_presets = false;
    int m = 0;
    int nmax = 20;
    int ntrunc = 60;
    int npoints = 200;
    double x0 = 1.0, p0 = 1.0;
    double k0_re = 0.5, k0_im = 0.0;
    std::optional<double> squeeze_ratio;  // defaults to the balanced ratio
    bool self_consistent = false;
    std::string recursion = "exact";      // exact | printed
    double beta0_re = 0.3, beta0_im = 0.0;
    std::string f_mode = "consistent";    // consistent | printed
    std::string parity = "even";
    std::string state = "mucs";           // state used by evolve and audit
    double t_start = 0.0, t_stop = 1.0;
    int t_steps = 11;
    bool closed_form = false;
    double tol = 1e-8;
    double tail_limit = 1e-8;
    std::string output;                   // empty: standard output
    std::string format = "json";          // json | csv
};

nlohmann::json config_json(const RunConfig& c);

// Exit codes: 0 success, 2 validation failure, 3 numeric failure.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace sip
