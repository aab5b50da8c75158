#include "cmslab/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include "cmslab/heckerep.hpp"
#include "cmslab/hybrid.hpp"
#include "cmslab/rmatrix.hpp"
#include "cmslab/suites.hpp"

namespace cmslab::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

int pick(int v, int fallback) { return v > 0 ? v : fallback; }

void require_dim(int n, int N) {
    if (n < 1 || N < 1) throw UsageError("n and N must be positive");
    double d = std::pow(static_cast<double>(N), n);
    if (d > static_cast<double>(kMaxDenseDim))
        throw CostGuardError("N^n = " + std::to_string(static_cast<long long>(d)) + " exceeds the dense limit " +
                             std::to_string(kMaxDenseDim));
}

std::vector<FlowSegment> segments(const RunConfig& c) {
    std::vector<FlowSegment> s;
    for (int k : c.hams) {
        if (k < 1 || k > 4) throw UsageError("--hams entries must lie in 1..4");
        s.push_back(FlowSegment::single(k, c.t));
    }
    if (s.empty()) throw UsageError("--hams must not be empty");
    return s;
}

PhasePoint initial_point(const RunConfig& c, int n) {
    if (c.freezing) return freezing_point(n);
    std::mt19937_64 rng(c.seed);
    return suites::random_point(n, rng);
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// Writes the summary to stdout and, with --out, to <out>/<name>.
void emit(const RunConfig& c, const std::string& name, const nlohmann::json& summary, std::ostream& out) {
    const std::string text = dump(summary);
    out << text;
    if (c.out.empty()) return;
    fs::create_directories(c.out);
    std::ofstream f(fs::path(c.out) / name, std::ios::binary);
    f << text;
}

// Data files go to <out> or the working directory.
std::ofstream data_file(const RunConfig& c, const std::string& name) {
    fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
    fs::create_directories(dir);
    return std::ofstream(dir / name, std::ios::binary);
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ',');)
        if (!p.empty()) parts.push_back(p);
    return parts;
}

std::vector<Report> run_suite(const std::string& name, const RunConfig& c) {
    if (name == "hecke") return suites::hecke(pick(c.n, 3));
    if (name == "goldens") return suites::goldens();
    if (name == "unity") return suites::unity();
    if (name == "freezing") return suites::freezing(pick(c.n, 4), c.tol > 0 ? c.tol : 1e-11);
    if (name == "hs") {
        require_dim(pick(c.n, 4), pick(c.N, 2));
        return suites::haldane_shastry(pick(c.n, 4), pick(c.N, 2), c.tol > 0 ? c.tol : 1e-11);
    }
    if (name == "compat") {
        require_dim(pick(c.n, 3), pick(c.N, 2));
        return suites::compatibility(pick(c.n, 3), pick(c.N, 2), c.seed, 5, c.step);
    }
    if (name == "laws") return suites::evolution_laws(c.seed, 10, c.step);
    if (name == "wkb") return suites::wkb(c.hbars, 0.8);
    if (name == "rmatrix") return suites::rmatrix(pick(c.N, 2), c.tol > 0 ? c.tol : 1e-12);
    throw UsageError("unknown suite '" + name + "'");
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
    nlohmann::json reports = nlohmann::json::array();
    bool pass = true;
    for (const auto& name : split(c.suite)) {
        for (const auto& r : run_suite(name, c)) {
            nlohmann::json j = r;
            j["suite"] = name;
            reports.push_back(j);
            pass = pass && r.pass;
        }
    }
    if (reports.empty()) throw UsageError("--suite selected nothing");
    emit(c, "verify.json", {{"command", "verify"}, {"config", to_json(c)}, {"pass", pass}, {"reports", reports}},
         out);
    return pass ? kPass : kAssertion;
}

nlohmann::json drift_table(const Trajectory& tr) {
    nlohmann::json d = nlohmann::json::object();
    if (tr.H.empty()) return d;
    for (std::size_t k = 1; k <= tr.H.front().size(); ++k) d["H" + std::to_string(k)] = tr.max_drift(static_cast<int>(k));
    return d;
}

int cmd_flow(const RunConfig& c, std::ostream& out) {
    const int n = pick(c.n, 3);
    FlowOptions opt;
    opt.step = c.step;
    const PhasePoint x0 = initial_point(c, n);
    nlohmann::json summary{{"command", "flow"}, {"config", to_json(c)}, {"csv", "trajectory.csv"}};
    try {
        auto tr = flow(x0, segments(c), opt);
        auto f = data_file(c, "trajectory.csv");
        write_csv(f, tr);
        summary["partial"] = false;
        summary["points"] = tr.size();
        summary["max_drift"] = drift_table(tr);
        emit(c, "flow.json", summary, out);
        return kPass;
    } catch (const FlowError& e) {
        auto f = data_file(c, "trajectory.csv");
        write_csv(f, e.partial());
        summary["partial"] = true;
        summary["error"] = e.what();
        summary["points"] = e.partial().size();
        emit(c, "flow.json", summary, out);
        return kGuard;
    }
}

CMatrix expmi(const CMatrix& H, double t) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    CVector ph = (cplx(0, -t) * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

int cmd_transport(const RunConfig& c, std::ostream& out) {
    const int n = pick(c.n, 3), N = pick(c.N, 2);
    require_dim(n, N);
    std::mt19937_64 rng(c.seed + 1);
    const SpinVector psi0 = SpinVector::random(n, N, rng);
    auto r = transport(initial_point(c, n), psi0, segments(c), c.step);
    {
        auto f = data_file(c, "transport.csv");
        write_csv(f, r);
    }
    nlohmann::json summary{{"command", "transport"}, {"config", to_json(c)}, {"csv", "transport.csv"},
                           {"points", r.trajectory.size()}, {"max_norm_drift", r.max_norm_drift},
                           {"max_drift", drift_table(r.trajectory)}};
    if (c.freezing) {
        // x_* is fixed up to a rigid rotation, which leaves every M_k invariant
        std::vector<CMatrix> M;
        for (int k : c.hams) M.push_back(haldane_shastry(k, n, N).to_dense());
        auto f = data_file(c, "fidelity.csv");
        f << "t,fidelity,error\n";
        f.precision(17);
        double worst = 0;
        for (std::size_t s = 0; s < r.trajectory.size(); ++s) {
            const int seg = r.trajectory.segment[s];
            double start = 0;
            for (int k = 0; k < seg; ++k) start += c.t;
            CVector exact = psi0.amplitudes();
            for (int k = 0; k < seg; ++k) exact = expmi(M[k], c.t) * exact;
            exact = expmi(M[seg], r.trajectory.t[s] - start) * exact;
            const CVector& got = r.psi[s].amplitudes();
            const double fid = std::norm(exact.dot(got));
            const double err = (got - exact).norm();
            worst = std::max(worst, err);
            f << r.trajectory.t[s] << "," << fid << "," << err << "\n";
        }
        summary["fidelity_csv"] = "fidelity.csv";
        summary["max_error_vs_exp_minus_i_t_M"] = worst;
    }
    emit(c, "transport.json", summary, out);
    return kPass;
}

int cmd_wkb(const RunConfig& c, std::ostream& out) {
    auto pr = suites::wkb_case(c.wkb_case);
    auto st = suites::wkb_convergence(pr, c.hbars, c.t);
    {
        const double h = *std::min_element(c.hbars.begin(), c.hbars.end());
        auto f = data_file(c, "wkb.csv");
        write_csv(f, assemble(pr, suites::kWKBGrid, c.t, {h})[0]);
    }
    nlohmann::json summary{{"command", "wkb"}, {"config", to_json(c)}, {"convergence", st}, {"csv", "wkb.csv"}};
    emit(c, "wkb.json", summary, out);
    return kPass;
}

int cmd_rmatrix(const RunConfig& c, std::ostream& out) {
    RunConfig d = c;
    d.suite = "rmatrix";
    return cmd_verify(d, out);
}

int cmd_freeze(const RunConfig& c, std::ostream& out) {
    const int n = pick(c.n, 4), N = pick(c.N, 2);
    require_dim(n, N);
    const PhasePoint x = freezing_point(n);
    nlohmann::json ops = nlohmann::json::object();
    std::vector<CMatrix> M;
    for (int k : c.hams) {
        if (k < 2 || k > 4) throw UsageError("freeze: --hams entries must lie in 2..4");
        CMatrix m = haldane_shastry(k, n, N).to_dense();
        Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
        std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
        for (double& v : ev)
            if (std::abs(v) < 1e-13) v = 0;
        ops["M" + std::to_string(k)] = {{"spectrum", ev}};
        M.push_back(m);
    }
    double comm = 0;
    for (std::size_t a = 0; a < M.size(); ++a)
        for (std::size_t b = a + 1; b < M.size(); ++b) comm = std::max(comm, (M[a] * M[b] - M[b] * M[a]).norm());
    nlohmann::json summary{{"command", "freeze"}, {"config", to_json(c)}, {"q", x.q}, {"p", x.p},
                           {"operators", ops}, {"max_commutator", comm}};
    emit(c, "freeze.json", summary, out);
    return kPass;
}

}  // namespace

nlohmann::json to_json(const RunConfig& c) {
    return {{"suite", c.suite}, {"case", c.wkb_case}, {"n", c.n}, {"N", c.N}, {"hams", c.hams},
            {"t", c.t}, {"step", c.step}, {"tol", c.tol}, {"hbars", c.hbars}, {"seed", c.seed},
            {"freezing", c.freezing}};
}

void merge(RunConfig& c, const nlohmann::json& j, const std::vector<std::string>& skip) {
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    auto take = [&](const char* key, auto& field) {
        if (!j.contains(key) || std::find(skip.begin(), skip.end(), key) != skip.end()) return;
        j.at(key).get_to(field);
    };
    static const std::vector<std::string> known{"suite", "case", "n", "N", "hams", "t", "step", "tol",
                                                "hbars", "seed", "freezing", "out"};
    for (const auto& [k, v] : j.items())
        if (std::find(known.begin(), known.end(), k) == known.end()) throw UsageError("unknown config key '" + k + "'");
    try {
        take("suite", c.suite);
        take("case", c.wkb_case);
        take("n", c.n);
        take("N", c.N);
        take("hams", c.hams);
        take("t", c.t);
        take("step", c.step);
        take("tol", c.tol);
        take("hbars", c.hbars);
        take("seed", c.seed);
        take("freezing", c.freezing);
        take("out", c.out);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("bad config value: ") + e.what());
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"cmslab: spin Calogero-Moser-Sutherland verification laboratory", "cmslab"};
    app.require_subcommand(1);
    RunConfig c;
    std::string config_path;

    struct Flag {
        std::string key;
        CLI::Option* opt;
    };
    std::vector<Flag> flags;

    auto common = [&](CLI::App* sub) {
        flags.push_back({"n", sub->add_option("--n", c.n, "number of sites")});
        flags.push_back({"N", sub->add_option("--N", c.N, "local spin dimension")});
        flags.push_back({"seed", sub->add_option("--seed", c.seed, "seed for random points")});
        flags.push_back({"tol", sub->add_option("--tol", c.tol, "tolerance override")});
        flags.push_back({"step", sub->add_option("--step", c.step, "integration step")});
        flags.push_back({"out", sub->add_option("--out", c.out, "output directory")});
        flags.push_back({"t", sub->add_option("--t", c.t, "flow time per Hamiltonian")});
        flags.push_back({"hams", sub->add_option("--hams", c.hams, "Hamiltonian indices, e.g. 2,3")->delimiter(',')});
        flags.push_back({"hbars", sub->add_option("--hbars", c.hbars, "hbar values, e.g. 0.2,0.1")->delimiter(',')});
        sub->add_option("--config", config_path, "JSON config; flags take precedence");
    };
    auto* verify = app.add_subcommand("verify", "run verification suites");
    common(verify);
    flags.push_back({"suite", verify->add_option("--suite", c.suite,
                                                 "comma list of hecke, goldens, unity, freezing, hs, compat, laws, "
                                                 "wkb, rmatrix")});
    auto* flow_cmd = app.add_subcommand("flow", "integrate classical flows");
    common(flow_cmd);
    flags.push_back({"freezing", flow_cmd->add_flag("--freezing", c.freezing, "start at the freezing point")});
    auto* transport_cmd = app.add_subcommand("transport", "hybrid spin transport");
    common(transport_cmd);
    flags.push_back({"freezing", transport_cmd->add_flag("--freezing", c.freezing, "start at the freezing point")});
    auto* wkb_cmd = app.add_subcommand("wkb", "WKB convergence study");
    common(wkb_cmd);
    flags.push_back({"case", wkb_cmd->add_option("--case", c.wkb_case, "free-gaussian or cosine")});
    auto* rm_cmd = app.add_subcommand("rmatrix", "R-matrix identity suite");
    common(rm_cmd);
    auto* freeze_cmd = app.add_subcommand("freeze", "Haldane-Shastry operators at the freezing point");
    common(freeze_cmd);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kUsage;
    }

    try {
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw UsageError("cannot read config " + config_path);
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(f);
            } catch (const nlohmann::json::parse_error& e) {
                throw UsageError(std::string("config is not valid JSON: ") + e.what());
            }
            std::vector<std::string> given;
            for (const auto& fl : flags)
                if (fl.opt->count() > 0) given.push_back(fl.key);
            merge(c, j, given);
        }
        if (c.step <= 0 || c.t < 0 || c.tol < 0) throw UsageError("step must be positive, t and tol non-negative");
        for (double h : c.hbars)
            if (h <= 0) throw UsageError("hbar values must be positive");

        if (verify->parsed()) return cmd_verify(c, out);
        if (flow_cmd->parsed()) return cmd_flow(c, out);
        if (transport_cmd->parsed()) return cmd_transport(c, out);
        if (wkb_cmd->parsed()) return cmd_wkb(c, out);
        if (rm_cmd->parsed()) return cmd_rmatrix(c, out);
        if (freeze_cmd->parsed()) return cmd_freeze(c, out);
        return kUsage;
    } catch (const NumericalGuardError& e) {
        err << "numerical guard: " << e.what() << "\n";
        return kGuard;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::length_error& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    }
}

}  // namespace cmslab::cli
