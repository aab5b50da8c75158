#include "cmslab/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

using namespace cmslab::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run_args(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("cmslab-test-cli-" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST(Cli, VerifyHeckePasses) {
    auto r = run_args({"verify", "--suite", "hecke", "--n", "3"});
    EXPECT_EQ(r.code, kPass);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["pass"].get<bool>());
    int hecke = 0;
    for (const auto& e : j["reports"]) {
        EXPECT_FALSE(e["anchor"].get<std::string>().empty());
        if (e["anchor"] == "degenerate affine Hecke algebra relations") ++hecke;
    }
    EXPECT_GT(hecke, 0);
}

TEST(Cli, CostGuardIsUsageError) {
    auto r = run_args({"verify", "--suite", "hecke", "--n", "9"});
    EXPECT_EQ(r.code, kUsage);
    EXPECT_NE(r.err.find("n = 9"), std::string::npos);
    EXPECT_EQ(run_args({"freeze", "--n", "9", "--N", "3"}).code, kUsage);
}

TEST(Cli, BadInvocationsAreUsageErrors) {
    EXPECT_EQ(run_args({}).code, kUsage);
    EXPECT_EQ(run_args({"verify", "--suite", "nosuch"}).code, kUsage);
    EXPECT_EQ(run_args({"verify", "--n", "x"}).code, kUsage);
    EXPECT_EQ(run_args({"flow", "--step", "-1"}).code, kUsage);
    EXPECT_EQ(run_args({"wkb", "--case", "square-well"}).code, kUsage);
    EXPECT_EQ(run_args({"flow", "--hams", "7"}).code, kUsage);
}

TEST(Cli, ConfigFileWithFlagOverride) {
    auto dir = scratch("config");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "c.json");
        f << R"({"suite": "freezing", "n": 5, "tol": 1e-11})";
    }
    auto r = run_args({"verify", "--config", (dir / "c.json").string(), "--n", "3"});
    EXPECT_EQ(r.code, kPass);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["config"]["suite"], "freezing");
    EXPECT_EQ(j["config"]["n"], 3);
    EXPECT_EQ(j["config"]["tol"], 1e-11);
    {
        std::ofstream f(dir / "bad.json");
        f << R"({"sweet": 1})";
    }
    EXPECT_EQ(run_args({"verify", "--config", (dir / "bad.json").string()}).code, kUsage);
    EXPECT_EQ(run_args({"verify", "--config", (dir / "missing.json").string()}).code, kUsage);
    fs::remove_all(dir);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
    auto a = run_args({"verify", "--suite", "compat,rmatrix", "--seed", "5"});
    auto b = run_args({"verify", "--suite", "compat,rmatrix", "--seed", "5"});
    EXPECT_EQ(a.code, kPass);
    EXPECT_EQ(a.out, b.out);
    auto c = run_args({"verify", "--suite", "compat", "--seed", "6"});
    EXPECT_NE(a.out.substr(0, 400), c.out.substr(0, 400));
}

TEST(Cli, FlowWritesTrajectoryAndDrift) {
    auto dir = scratch("flow");
    auto r = run_args({"flow", "--n", "3", "--hams", "2,3", "--t", "0.5", "--step", "1e-3", "--out", dir.string()});
    EXPECT_EQ(r.code, kPass);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["points"], 1001);
    EXPECT_LT(j["max_drift"]["H2"].get<double>(), 1e-10);
    EXPECT_TRUE(fs::exists(dir / "trajectory.csv"));
    EXPECT_TRUE(fs::exists(dir / "flow.json"));
    fs::remove_all(dir);
}

TEST(Cli, TransportAtFreezingPointMatchesExponential) {
    auto dir = scratch("transport");
    auto r = run_args({"transport", "--n", "3", "--N", "2", "--freezing", "--hams", "2,3", "--t", "1", "--step",
                       "1e-2", "--out", dir.string()});
    EXPECT_EQ(r.code, kPass);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_LT(j["max_error_vs_exp_minus_i_t_M"].get<double>(), 1e-8);
    EXPECT_TRUE(fs::exists(dir / "fidelity.csv"));
    fs::remove_all(dir);
}

TEST(Cli, RmatrixAndFreeze) {
    EXPECT_EQ(run_args({"rmatrix", "--N", "3"}).code, kPass);
    auto r = run_args({"freeze", "--n", "4", "--N", "2", "--hams", "2,3"});
    EXPECT_EQ(r.code, kPass);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_LT(j["max_commutator"].get<double>(), 1e-11);
    EXPECT_EQ(j["operators"]["M2"]["spectrum"].size(), 16u);
}

TEST(Cli, WkbConvergenceJson) {
    auto dir = scratch("wkb");
    auto r = run_args({"wkb", "--case", "free-gaussian", "--hbars", "0.2,0.1", "--out", dir.string()});
    EXPECT_EQ(r.code, kPass);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["convergence"]["rows"].size(), 2u);
    EXPECT_GT(j["convergence"]["order_estimate"].get<double>(), 0.8);
    EXPECT_TRUE(fs::exists(dir / "wkb.csv"));
    fs::remove_all(dir);
}

TEST(Cli, NumericalGuardExitCode) {
    // hbar this small under-resolves the reference grid
    auto dir = scratch("guard");
    auto r = run_args({"wkb", "--case", "cosine", "--hbars", "0.002,0.001", "--out", dir.string()});
    EXPECT_EQ(r.code, kGuard);
    EXPECT_NE(r.err.find("numerical guard"), std::string::npos);
    fs::remove_all(dir);
}
