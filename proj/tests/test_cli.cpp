#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult sipcli(const std::string& args) {
    const char* bin = std::getenv("SIPCLI");
    REQUIRE_MESSAGE(bin != nullptr, "SIPCLI must point at the sipcli binary");
    const std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace

TEST_CASE("validate accepts every preset") {
    for (const char* p : {"shifted_oscillator", "morse", "natanzon"}) {
        const auto r = sipcli(std::string("validate --preset ") + p);
        INFO(p);
        CHECK(r.code == 0);
        const auto doc = nlohmann::json::parse(r.out);
        CHECK(doc.contains("config"));
        CHECK(doc.contains("spec"));
        CHECK(doc.contains("result"));
    }
}

TEST_CASE("spectrum as CSV") {
    const auto r = sipcli("spectrum --preset shifted_oscillator --param alpha=2 --nmax 4 --format csv");
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    int rows = 0;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            CHECK(line.rfind("n,m,E", 0) == 0);
            header = true;
            continue;
        }
        int n, m;
        double E;
        REQUIRE(std::sscanf(line.c_str(), "%d,%d,%lf", &n, &m, &E) == 3);
        CHECK(E == doctest::Approx(2.0 * (n - m + 1)).epsilon(1e-14));
        ++rows;
    }
    CHECK(rows == 5);
}

TEST_CASE("crosscheck reports the mu column with both values") {
    const auto r = sipcli("crosscheck --preset morse");
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    int mu_rows = 0;
    for (const auto& row : doc["result"]["findings"])
        if (row["column"] == "mu") {
            ++mu_rows;
            CHECK(row.contains("printed"));
            CHECK(row.contains("computed"));
        }
    CHECK(mu_rows > 0);
}

TEST_CASE("exit codes") {
    CHECK(sipcli("").code == 2);
    CHECK(sipcli("spectrum --preset shifted_oscillator --no-such-flag").code == 2);
    CHECK(sipcli("spectrum --preset no_such_preset").code == 2);
    CHECK(sipcli("validate --preset three_dim_oscillator --param alpha=-3").code == 2);
    const std::string bad = "test_cli_bad_spec.json";
    {
        std::ofstream f(bad);
        f << "{\"name\": 1";
    }
    CHECK(sipcli("validate --spec " + bad).code == 2);
    std::remove(bad.c_str());
    // the state does not fit in 11 basis functions
    const auto r = sipcli("mucs --preset shifted_oscillator --ntrunc 10 --k0-re 5");
    CHECK(r.code == 3);
    CHECK(nlohmann::json::parse(r.out)["status"] == 3);
}

TEST_CASE("subcommands run and are deterministic") {
    for (const std::string args : {"orthopoly --preset scarf1_trigonometric --nmax 5", "wavefunction --preset morse --nmax 4",
                             "operators --preset gen_poschl_teller --nmax 6", "classical --preset scarf2_hyperbolic",
                             "mucs --preset scarf2_hyperbolic --self-consistent --nmax 23 --k0-re 0.2", "aocs --preset three_dim_oscillator",
                             "cat --preset shifted_oscillator --parity odd", "evolve --preset natanzon --nmax 8 --t-range 0,1,3",
                             "audit --preset shifted_oscillator"}) {
        INFO(args);
        const auto a = sipcli(args), b = sipcli(args);
        CHECK(a.code == 0);
        CHECK(nlohmann::json::parse(a.out)["status"] == 0);
        CHECK(a.out == b.out);
        CHECK(nlohmann::json::accept(a.out));
    }
}
