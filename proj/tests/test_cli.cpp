#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

// Process-level checks of the command-line front-end; the binary path comes
// from the build system.

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string out_file = "cli_test_stdout.tmp";
    const std::string cmd =
        std::string(NSK_CLI_PATH) + " " + args + " > " + out_file + " 2> cli_test_stderr.tmp";
    const int rc = std::system(cmd.c_str());
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(rc), ss.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

constexpr const char* kExpKernel = R"({"variant":"exponential","alpha":0.5})";
constexpr const char* kMlKernel = R"({"variant":"mittag_leffler","alpha":0.5,"nu":0.5})";

} // namespace

TEST_CASE("density command") {
    // x = 0 row of the exponential kernel at t = 1 is e^{-1}
    auto res = run_cli(std::string("density --kernel '") + kExpKernel +
                       "' --t 1 --x-min 0 --x-max 2 --points 5 --linear --out cli_density.csv");
    REQUIRE(res.exit_code == 0);
    const std::string csv = slurp("cli_density.csv");
    CHECK(csv.rfind("x,density,t,kernel_id", 0) == 0); // header row mandatory
    std::stringstream ss(csv);
    std::string header, first;
    std::getline(ss, header);
    std::getline(ss, first);
    const double density0 = std::stod(first.substr(first.find(',') + 1));
    CHECK_THAT(density0, Catch::Matchers::WithinAbs(std::exp(-1.0), 1e-12));
    CHECK(slurp("cli_density.csv.manifest.json").find("\"command\"") != std::string::npos);

    // t = 0: all-zero density column
    res = run_cli(std::string("density --kernel '") + kExpKernel +
                  "' --t 0 --x-min 0 --x-max 2 --points 4 --linear --out cli_density0.csv");
    REQUIRE(res.exit_code == 0);
    std::stringstream zs(slurp("cli_density0.csv"));
    std::string line;
    std::getline(zs, line);
    while (std::getline(zs, line)) {
        if (line.empty()) continue;
        const auto a = line.find(',');
        const auto b = line.find(',', a + 1);
        CHECK(std::stod(line.substr(a + 1, b - a - 1)) == 0.0);
    }

    // cross-check against the inversion route passes at 1e-4
    res = run_cli(std::string("density --kernel '") + kMlKernel +
                  "' --t 1 --x-min 0.1 --x-max 3 --points 8 --cross-check --tol 1e-4 "
                  "--out cli_density_ml.csv");
    CHECK(res.exit_code == 0);
}

TEST_CASE("residual command") {
    auto res = run_cli(std::string("residual --kernel '") + kExpKernel +
                       "' --x 0.5,1.0 --t 0.5,1.0 --tol 1e-5 --out cli_residual.csv");
    REQUIRE(res.exit_code == 0);
    CHECK(slurp("cli_residual.csv").rfind("x,t,lhs,rhs,residual,fd_step,kernel_id", 0) == 0);
    CHECK(res.output.find("max |residual|") != std::string::npos);

    // the general form is refused for the ML kernel: nan rows, exit 0
    res = run_cli(std::string("residual --kernel '") + kMlKernel +
                  "' --x 1.0 --t 1.0 --general-form --out cli_residual_ml.csv");
    REQUIRE(res.exit_code == 0);
    CHECK(slurp("cli_residual_ml.csv").find("nan") != std::string::npos);

    // missing grid is a usage error
    res = run_cli(std::string("residual --kernel '") + kExpKernel + "' --t 1.0");
    CHECK(res.exit_code != 0);
}

TEST_CASE("laplace-check command") {
    const auto res = run_cli(std::string("laplace-check --kernel '") + kExpKernel +
                             "' --t 1 --x-min 0.1 --x-max 5 --x-points 4");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("forward") != std::string::npos);
    CHECK(res.output.find("invert") != std::string::npos);
    CHECK(res.output.find("FAIL") == std::string::npos);
}

TEST_CASE("simulate command is reproducible byte for byte") {
    const std::string args = std::string("simulate --kernel '") + kExpKernel +
                             "' --t 1 --paths 2000 --seed 42 --out cli_paths.csv "
                             "--summary cli_summary.json";
    REQUIRE(run_cli(args + " --threads 1").exit_code == 0);
    const std::string first = slurp("cli_paths.csv");
    const std::string summary1 = slurp("cli_summary.json");
    REQUIRE(run_cli(args + " --threads 4").exit_code == 0);
    CHECK(slurp("cli_paths.csv") == first);
    CHECK(first.rfind("path_id,jump_time,jump_size", 0) == 0);

    CHECK(summary1.find("zero_jump_fraction") != std::string::npos);
    CHECK(summary1.find("ks_statistic") != std::string::npos);
    CHECK(summary1.find("xoshiro256++") != std::string::npos);
}

TEST_CASE("risk command") {
    auto res = run_cli(std::string("risk --kernel '") + kMlKernel +
                       "' --a 1 --beta 2 --horizon 5 --paths 2000 --seed 7");
    REQUIRE(res.exit_code == 0);
    CHECK(res.output.find("\"net_profit_status\": \"infinite_mean\"") != std::string::npos);

    res = run_cli(std::string("risk --kernel '") + kExpKernel +
                  "' --a 1 --beta 2 --horizon 5 --paths 2000 --seed 7");
    REQUIRE(res.exit_code == 0);
    CHECK(res.output.find("\"net_profit_status\": \"satisfied\"") != std::string::npos);
    CHECK(res.output.find("estimate") != std::string::npos);

    // missing required --beta is a usage error with nonzero exit
    res = run_cli(std::string("risk --kernel '") + kExpKernel + "' --a 1");
    CHECK(res.exit_code != 0);
}

TEST_CASE("selftest command") {
    const auto res = run_cli("selftest --fast");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("PASS") != std::string::npos);
    CHECK(res.output.find("FAIL ") == std::string::npos);
}

TEST_CASE("bad kernel json is a usage error") {
    const auto res = run_cli("density --kernel '{\"variant\":\"bogus\"}' --t 1");
    CHECK(res.exit_code != 0);
}
