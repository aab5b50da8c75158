#pragma once

// Command-line front end. Exit codes: 0 pass, 1 usage, 2 assertion failure, 3 numerical guard.

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace cmslab::cli {

enum ExitCode { kPass = 0, kUsage = 1, kAssertion = 2, kGuard = 3 };

/// Flags override values from --config. Zero for n or N selects the command's default.
struct RunConfig {
    std::string suite = "hecke";
    std::string wkb_case = "free-gaussian";
    int n = 0;
    int N = 0;
    std::vector<int> hams{2};
    double t = 1.0;
    double step = 1e-3;
    double tol = 0;
    std::vector<double> hbars{0.2, 0.1, 0.05, 0.025};
    unsigned long seed = 1;
    bool freezing = false;
    std::string out;
};

/// Everything except output locations; this is what reports echo back.
nlohmann::json to_json(const RunConfig& c);
/// Overwrites the fields present in j.
void merge(RunConfig& c, const nlohmann::json& j, const std::vector<std::string>& skip);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cmslab::cli
