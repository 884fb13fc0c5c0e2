#include "cli.hpp"

#include "weakslit/weak_value.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace weakslit;
using weakslit::cli::run;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome call(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string fixture(const char* name) {
    return (std::filesystem::path(WEAKSLIT_FIXTURES) / name).string();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

// Runs the installed binary through the shell; returns exit status and stdout.
std::pair<int, std::string> run_binary(const std::string& args) {
    const std::string cmd = std::string(WEAKSLIT_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return {-1, ""};
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

const std::vector<std::string> kForward{"trajectory", "--mode", "forward", "--r", "0.05", "--sigma",
                                        "0.2", "--T", "1", "--xi", "0.1", "--xf", "0.05"};

} // namespace

TEST(CliTrajectory, ForwardColumnsAndValues) {
    auto args = kForward;
    args.insert(args.end(), {"--steps", "3"});
    const auto r = call(args);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "tau", "x_w", "band_low", "band_high", "S_w"}));
    EXPECT_EQ(std::stod(rows[1][2]), forward_two_slit(0.1, 0.05, 1.0, 1.0, {0.05, 0.2, 1.0}));
    EXPECT_EQ(rows[3][0], "1");
    EXPECT_EQ(rows[3][2], "0.050000000000000003");
    EXPECT_EQ(std::stod(rows[3][5]), std::exp(0.05));
}

TEST(CliTrajectory, NSlitPairIsByteIdenticalToForward) {
    const auto f = call(kForward);
    const auto n = call({"trajectory", "--mode", "nslit", "--r", "0.05", "--sigma", "0.2", "--T", "1",
                         "--slits", "0.1,-0.1", "--xf", "0.05"});
    ASSERT_EQ(f.code, 0);
    ASSERT_EQ(n.code, 0) << n.err;
    EXPECT_EQ(f.out, n.out);
}

TEST(CliTrajectory, InverseAndShift) {
    const auto r = call({"trajectory", "--mode", "inverse", "--r", "0.05", "--sigma", "0.2", "--T", "1",
                         "--xi", "0.1", "--xf", "0.05", "--steps", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    EXPECT_EQ(std::stod(rows[1][2]), 0.1);
    EXPECT_NEAR(std::stod(rows[2][2]), 0.00805423048206596064, 1e-17);

    const auto shifted = call({"trajectory", "--r", "0.05", "--sigma", "0.2", "--T", "1", "--xi", "0.1",
                               "--final-price", "110", "--shift-c", "4.6", "--steps", "2"});
    ASSERT_EQ(shifted.code, 0) << shifted.err;
    const auto srows = parse_csv(shifted.out);
    EXPECT_NEAR(std::stod(srows[2][2]), std::log(110.0) - 4.6, 1e-15);
    EXPECT_NEAR(std::stod(srows[2][5]), 110.0, 1e-12);
}

TEST(CliTrajectory, JsonOutputParses) {
    auto args = kForward;
    args.insert(args.end(), {"--format", "json", "--steps", "5"});
    const auto r = call(args);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc["columns"].size(), 6u);
    ASSERT_EQ(doc["rows"].size(), 5u);
    EXPECT_EQ(doc["rows"][4]["x_w"].get<double>(), 0.05);
    EXPECT_EQ(doc["rows"][0]["tau"].get<double>(), 1.0);
}

TEST(CliTrajectory, OutFileMatchesStdout) {
    const auto path = std::filesystem::temp_directory_path() / "weakslit_cli_test.csv";
    auto args = kForward;
    args.insert(args.end(), {"--out", path.string()});
    const auto r = call(args);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    EXPECT_EQ(buf.str(), call(kForward).out);
    std::filesystem::remove(path);
}

TEST(CliTrajectory, UsageAndDomainErrors) {
    EXPECT_EQ(call({}).code, 2);
    EXPECT_EQ(call({"bogus"}).code, 2);
    EXPECT_EQ(call({"trajectory", "--r", "0.05", "--sigma", "0.2"}).code, 2);
    auto both = kForward;
    both.insert(both.end(), {"--final-price", "100"});
    EXPECT_EQ(call(both).code, 2);
    auto fmt = kForward;
    fmt.insert(fmt.end(), {"--format", "xml"});
    EXPECT_EQ(call(fmt).code, 2);
    auto steps = kForward;
    steps.insert(steps.end(), {"--steps", "1"});
    EXPECT_EQ(call(steps).code, 1);
    EXPECT_EQ(call({"trajectory", "--r", "0.05", "--sigma", "-0.2", "--T", "1", "--xi", "0.1", "--xf", "0"})
                  .code,
              1);
    EXPECT_EQ(call({"trajectory", "--r", "0.05", "--sigma", "0.2", "--T", "1", "--xi", "0.1",
                    "--final-price", "-3"})
                  .code,
              1);
}

TEST(CliKernel, EvalWorkedPoint) {
    const auto r = call({"kernel", "eval", "--r", "0.05", "--sigma", "0.2", "--tau", "1", "--x", "0",
                         "--x-prime", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"x", "tau", "x_prime", "value"}));
    EXPECT_NEAR(std::stod(rows[1][3]), 1.87620173458468939, 1e-13);
    EXPECT_EQ(call({"kernel", "eval", "--r", "0.05", "--sigma", "0.2", "--tau", "0", "--x", "0",
                    "--x-prime", "0"})
                  .code,
              1);
}

TEST(CliKernel, ValidateIsReproducibleAndFailsHonestly) {
    const std::vector<std::string> args{"kernel", "validate", "--paths", "1000000", "--seed", "42"};
    const auto a = call(args);
    const auto b = call(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto rows = parse_csv(a.out);
    EXPECT_EQ(rows[0].back(), "pass");
    EXPECT_EQ(rows[1].back(), "1");

    const auto coarse = call({"kernel", "validate", "--paths", "1000", "--grid-n", "16",
                              "--time-steps", "4"});
    EXPECT_EQ(coarse.code, 3);
    EXPECT_NE(coarse.err.find("pde_linf_rel"), std::string::npos);
    EXPECT_EQ(parse_csv(coarse.out)[1].back(), "0");
}

TEST(CliScan, Fixtures) {
    const auto spike = call({"scan", "--csv", fixture("spike.csv")});
    ASSERT_EQ(spike.code, 0) << spike.err;
    const auto rows = parse_csv(spike.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1][0], "1700002400");
    EXPECT_EQ(rows[1][1], "1700002460");
    EXPECT_NEAR(std::stod(rows[1][6]), 0.0733017370959376967, 1e-15);

    const auto quiet = call({"scan", "--csv", fixture("quiet.csv")});
    ASSERT_EQ(quiet.code, 0);
    EXPECT_EQ(parse_csv(quiet.out).size(), 1u);
    const auto edge = call({"scan", "--csv", fixture("quiet.csv"), "--rvol-threshold", "1.0001"});
    EXPECT_EQ(parse_csv(edge.out).size(), 1u);

    EXPECT_EQ(call({"scan", "--csv", fixture("empty.csv")}).code, 0);
    EXPECT_EQ(call({"scan", "--csv", fixture("bad_header.csv")}).code, 1);
    EXPECT_EQ(call({"scan", "--csv", fixture("high_below_low.csv")}).code, 1);
    EXPECT_EQ(call({"scan", "--csv", fixture("missing.csv")}).code, 1);
    EXPECT_EQ(call({"scan", "--csv", fixture("spike.csv"), "--rvol-threshold", "0.5"}).code, 1);
    EXPECT_EQ(call({"scan"}).code, 2);
}

TEST(CliQm, PatternAndTrajectory) {
    const auto p = call({"qm", "pattern", "--m", "1", "--hbar", "1", "--T", "1", "--xi", "0.5",
                         "--points", "11"});
    ASSERT_EQ(p.code, 0) << p.err;
    const auto prows = parse_csv(p.out);
    ASSERT_EQ(prows.size(), 12u);
    EXPECT_EQ(prows[0], (std::vector<std::string>{"x_f", "intensity"}));
    EXPECT_EQ(std::stod(prows[6][1]), 2.0); // x_f = 0

    const auto t = call({"qm", "trajectory", "--m", "1", "--hbar", "1", "--T", "1", "--xi", "0.5",
                         "--xf", "3.141592653589793", "--steps", "3"});
    ASSERT_EQ(t.code, 0) << t.err;
    const auto trows = parse_csv(t.out);
    EXPECT_EQ(trows[0], (std::vector<std::string>{"t", "re", "im", "divergent"}));
    EXPECT_EQ(trows[1][3], "1");
    EXPECT_EQ(trows[3][3], "0");
    EXPECT_EQ(trows[3][2], "0");
    EXPECT_EQ(call({"qm", "pattern", "--m", "1", "--hbar", "1", "--T", "1"}).code, 2);
}

TEST(CliBinary, ExitCodesAndDeterminism) {
    const std::string fwd = "trajectory --r 0.05 --sigma 0.2 --T 1 --xi 0.1 --xf 0.05";
    const auto a = run_binary(fwd);
    const auto b = run_binary(fwd);
    EXPECT_EQ(a.first, 0);
    EXPECT_EQ(a.second, b.second);
    EXPECT_EQ(a.second, call(kForward).out);
    EXPECT_EQ(run_binary("trajectory --r 0.05").first, 2);
    EXPECT_EQ(run_binary("scan --csv " + fixture("bad_header.csv")).first, 1);
    EXPECT_EQ(run_binary("kernel validate --paths 1000 --grid-n 16 --time-steps 4").first, 3);
    EXPECT_EQ(run_binary("--help").first, 0);
}
