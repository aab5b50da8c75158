// One line per acceptance criterion; exit status is nonzero when any line fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "cmslab/suites.hpp"

#ifndef CMSLAB_CLI_PATH
#error "CMSLAB_CLI_PATH must name the cmslab executable"
#endif

using namespace cmslab;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

Outcome tally(const std::vector<Report>& rs) {
    int ok = 0;
    std::string first_fail;
    for (const auto& r : rs) {
        if (r.pass) ++ok;
        else if (first_fail.empty()) first_fail = r.identity + " " + r.witness.dump();
    }
    std::ostringstream os;
    os << ok << "/" << rs.size() << " checks";
    if (!first_fail.empty()) os << "; first failure: " << first_fail;
    return {ok == static_cast<int>(rs.size()) && !rs.empty(), os.str()};
}

void append(std::vector<Report>& a, std::vector<Report> b) {
    for (auto& r : b) a.push_back(std::move(r));
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

Outcome determinism() {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / ("cmslab-acceptance-" + std::to_string(::getpid()));
    std::vector<std::string> bodies;
    for (const char* run : {"a", "b"}) {
        const fs::path dir = base / run;
        const std::string cmd = std::string("\"") + CMSLAB_CLI_PATH +
                                "\" verify --suite hecke,compat,freezing --n 3 --seed 7 --out \"" + dir.string() +
                                "\" > /dev/null";
        if (std::system(cmd.c_str()) != 0) return {false, "cmslab verify exited nonzero"};
        bodies.push_back(slurp(dir / "verify.json"));
    }
    fs::remove_all(base);
    const bool same = !bodies[0].empty() && bodies[0] == bodies[1];
    return {same, std::to_string(bodies[0].size()) + " bytes, " + (same ? "identical" : "different")};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        std::string name;
        double budget;   // seconds
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "exact Hecke relations and cancellation identity, n = 2..4", 60,
         [] {
             std::vector<Report> rs;
             for (int n = 2; n <= 4; ++n) append(rs, suites::hecke(n));
             return tally(rs);
         }},
        {2, "restricted H_2 (n = 2, 3) and H_3 (n = 3) equal the displayed formulas", 120,
         [] { return tally(suites::goldens()); }},
        {3, "unity lemma and f_w = 0 for the generating product", 120, [] { return tally(suites::unity()); }},
        {4, "freezing point, n = 2..8", 30,
         [] {
             std::vector<Report> rs;
             for (int n = 2; n <= 8; ++n) append(rs, suites::freezing(n, 1e-11));
             return tally(rs);
         }},
        {5, "Haldane-Shastry commutativity and pair-coupling form", 60,
         [] {
             std::vector<Report> rs;
             for (auto [n, N] : std::vector<std::pair<int, int>>{{3, 2}, {4, 2}, {5, 2}, {3, 3}, {4, 3}})
                 append(rs, suites::haldane_shastry(n, N, 1e-11));
             return tally(rs);
         }},
        {6, "zero-curvature plateau and order-of-flows transport", 120,
         [] { return tally(suites::compatibility(3, 2, 2024, 5, 1e-3)); }},
        {7, "gauge shift, density/Heisenberg duality, monodromy unitarity", 60,
         [] { return tally(suites::evolution_laws(2024, 10, 1e-3)); }},
        {8, "WKB order in hbar, Hamilton-Jacobi residual, multi-time action", 600,
         [] { return tally(suites::wkb({0.2, 0.1, 0.05, 0.025}, 0.8)); }},
        {9, "R-matrix QYBE/CYBE, unitarity proposition, negative controls", 10,
         [] {
             std::vector<Report> rs = suites::rmatrix(2, 1e-12);
             append(rs, suites::rmatrix(3, 1e-12));
             return tally(rs);
         }},
        {10, "repeated verify runs give byte-identical JSON", 120, determinism},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("%s criterion %2d: %s | %s | %.2f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), o.detail.c_str(), secs, c.budget, in_time ? "" : ", exceeded");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
