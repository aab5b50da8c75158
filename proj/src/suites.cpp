#include "cmslab/suites.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "cmslab/goldens.hpp"
#include "cmslab/heckerep.hpp"
#include "cmslab/hybrid.hpp"
#include "cmslab/rmatrix.hpp"

namespace cmslab::suites {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0, 1);

Report bound(std::string identity, std::string anchor, nlohmann::json params, double value, double tol,
             const char* key = "residual") {
    params["tol"] = tol;
    return {std::move(identity), std::move(anchor), std::move(params), value <= tol, {{key, value}}};
}

Report exceeds(std::string identity, std::string anchor, nlohmann::json params, double value, double floor) {
    params["must_exceed"] = floor;
    return {std::move(identity), std::move(anchor), std::move(params), value > floor, {{"residual", value}}};
}

CMatrix dense(const SpinOperator& a) { return a.to_dense(); }

CMatrix sx() { return (CMatrix(2, 2) << 0, 1, 1, 0).finished(); }
CMatrix sy() { return (CMatrix(2, 2) << 0, -I, I, 0).finished(); }
CMatrix sz() { return (CMatrix(2, 2) << 1, 0, 0, -1).finished(); }

std::function<CVector(double)> gaussian_spinor() {
    CVector v = (CVector(2) << 0.8, 0.6 * I).finished();
    return [v](double q) -> CVector { return std::exp(-q * q / 2) * v; };
}

SpinOperator probe_field(const PhasePoint& x, int N) {
    const int n = x.sites();
    return permutation_op(1, 2, n, N) * cplx(std::cos(x.q[0] - x.q[1])) + permutation_op(2, 3, n, N) * cplx(x.p[2]) +
           SpinOperator::permutation(n, N, cyclic_shift(n)) * cplx(0.3, 0.2) +
           SpinOperator::permutation(n, N, inverse(cyclic_shift(n))) * cplx(0.3, -0.2);
}

double unitarity_defect(const CMatrix& M) {
    return (M * M.adjoint() - CMatrix::Identity(M.rows(), M.cols())).norm();
}

}  // namespace

PhasePoint random_point(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    PhasePoint x{std::vector<double>(n), std::vector<double>(n)};
    for (int i = 0; i < n; ++i) {
        x.p[i] = u(rng);
        x.q[i] = 2 * pi * (i + 0.25 * u(rng)) / n;
    }
    return x;
}

std::vector<Report> hecke(int n) {
    if (n < 2 || n > 4) throw CostGuardError("hecke suite runs for 2 <= n <= 4, got n = " + std::to_string(n));
    std::vector<Report> out = hecke_suite(n, OpKind::Quantum);
    for (auto& r : hecke_suite(n, OpKind::Semiclassical)) out.push_back(std::move(r));
    if (n >= 3)
        for (auto& r : kcancel_suite(n)) out.push_back(std::move(r));
    return out;
}

std::vector<Report> goldens() {
    std::vector<Report> out;
    const char* anchor = "spin Calogero-Moser Hamiltonians from Cherednik-Dunkl operators";
    auto check = [&](int k, int n, const RestrictedOperator& displayed) {
        const bool eq = restrict_to_symmetric(symmetric_hamiltonian(k, n, OpKind::Quantum)) == displayed;
        out.push_back({"restricted H_" + std::to_string(k) + " equals the displayed formula", anchor,
                       {{"k", k}, {"n", n}}, eq, {{"coefficient_equal", eq}}});
    };
    check(2, 2, goldens::displayed_H2(2));
    check(2, 3, goldens::displayed_H2(3));
    check(3, 3, goldens::displayed_H3(3));
    return out;
}

std::vector<Report> unity() {
    std::vector<Report> out;
    for (int n = 2; n <= 3; ++n)
        for (int k = 1; k <= 3; ++k) {
            auto s = semiclassical_split(restrict_to_symmetric(symmetric_hamiltonian(k, n, OpKind::Quantum)));
            const auto diff = s.h0 - lax_power_trace(k, n);
            out.push_back({"hbar^0 part of H_" + std::to_string(k) + " = (1/k) tr L^k",
                           "unity lemma: leading order is permutation free", {{"k", k}, {"n", n}}, diff.is_zero(),
                           diff.is_zero() ? nlohmann::json(nullptr) : nlohmann::json(diff.str())});
        }
    for (int n = 2; n <= 4; ++n)
        for (auto& r : classical_generating_check(n, 1, 7))
            if (r.identity.rfind("f_w", 0) == 0) out.push_back(std::move(r));
    return out;
}

std::vector<Report> freezing(int n, double tol, double horizon) {
    if (n < 2 || n > 12) throw CostGuardError("freezing suite runs for 2 <= n <= 12");
    std::vector<Report> out = verify_fixed_point(n, {-1.3, -0.4, 0.0, 0.7, 2.1}, tol);
    const PhasePoint x0 = freezing_point(n);
    FlowOptions opt;
    opt.step = 1e-2;
    auto tr = flow(x0, {FlowSegment::single(2, horizon)}, opt);
    double d = 0;
    for (const auto& x : tr.x) d = std::max(d, phase_distance(x, x0));
    out.push_back(bound("flow from x_* stays at x_*", "fixed point of the multi-time evolution",
                        {{"n", n}, {"horizon", horizon}}, d, 1e-10, "max_distance"));
    return out;
}

std::vector<Report> haldane_shastry(int n, int N, double tol) {
    const char* anchor = "Haldane-Shastry Hamiltonians at the freezing point commute";
    CMatrix M2 = dense(cmslab::haldane_shastry(2, n, N)), M3 = dense(cmslab::haldane_shastry(3, n, N));
    std::vector<Report> out;
    out.push_back(bound("[M_2, M_3] = 0", anchor, {{"n", n}, {"N", N}}, (M2 * M3 - M3 * M2).norm(), tol));
    SpinOperator ref(n, N);
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            const double s = std::sin(pi * (i - j) / n);
            ref += permutation_op(i, j, n, N) * cplx(1 / (4 * s * s));
        }
    out.push_back(bound("M_2 = sum_{i<j} P_ij / (4 sin^2(pi (i-j)/n))", "dynamical Haldane-Shastry chain",
                        {{"n", n}, {"N", N}}, (M2 - dense(ref)).norm(), 1e-12));
    return out;
}

std::vector<Report> compatibility(int n, int N, unsigned long seed, int points, double step) {
    std::mt19937_64 rng(seed);
    std::vector<Report> out;
    const char* zc = "zero-curvature condition for commuting hybrid flows";
    const std::vector<double> hs{1e-3, 5e-4, 2.5e-4, 1.25e-4};
    for (int s = 0; s < points; ++s) {
        auto x = random_point(n, rng);
        std::vector<double> res;
        for (double h : hs) res.push_back(zero_curvature_residual(x, 2, 3, N, h));
        // plateau: the last refinement is small and no refinement grew the residual beyond roundoff
        bool ok = res.back() <= 1e-7;
        for (std::size_t i = 1; i < res.size(); ++i) ok = ok && res[i] <= std::max(res[i - 1], 1e-7);
        out.push_back({"zero curvature (2,3) plateau", zc,
                       {{"n", n}, {"N", N}, {"point", s}, {"h", hs}, {"tol", 1e-7}}, ok, {{"residuals", res}}});
    }
    auto x = random_point(n, rng);
    auto psi = SpinVector::random(n, N, rng);
    auto d = order_of_flows(x, psi, 2, 0.5, 3, 0.5, step);
    out.push_back(bound("transport along t_2 then t_3 equals t_3 then t_2", "compatible multi-time hybrid evolution",
                        {{"n", n}, {"N", N}, {"step", step}}, d.spin, 1e-6));
    return out;
}

std::vector<Report> evolution_laws(unsigned long seed, int pairs, double step) {
    std::mt19937_64 rng(seed);
    std::vector<Report> out;
    {
        auto x = random_point(3, rng);
        auto psi = SpinVector::random(3, 2, rng);
        std::vector<FlowSegment> segs{FlowSegment::single(2, 0.6), FlowSegment::single(3, 0.4)};
        std::vector<std::pair<std::string, ScalarField>> cases{
            {"constant", [](const PhasePoint&) { return 0.8; }},
            {"energy", [](const PhasePoint& y) { return hamiltonian(2, y); }},
            {"mixed", [](const PhasePoint& y) { return y.p[0] + 0.3 * std::cos(y.q[1]); }}};
        for (const auto& [name, z] : cases) out.push_back(gauge_shift_check(name, x, psi, segs, z, step, 1e-8));
    }
    OperatorField s = [](const PhasePoint& y) { return probe_field(y, 2); };
    for (int k = 0; k < pairs; ++k) {
        auto x = random_point(3, rng);
        auto v = SpinVector::random(3, 2, rng);
        auto u = SpinVector::random(3, 2, rng);
        CMatrix rho = 0.7 * v.amplitudes() * v.amplitudes().adjoint() + 0.3 * u.amplitudes() * u.amplitudes().adjoint();
        std::vector<FlowSegment> segs{FlowSegment::single(2, 0.4), FlowSegment::single(3, 0.3)};
        auto rt = density_evolve({x, rho}, segs, 2, step);
        const cplx lhs = expectation_value(rt, s);
        const cplx rhs = (rho * heisenberg_evolve(s, x, segs, 2, step)).trace();
        out.push_back(bound("E_rho(s(t)) = E_rho(t)(s)", "evolution of densities is dual to evolution of observables",
                            {{"pair", k}, {"step", step}}, std::abs(lhs - rhs), 1e-9));
    }
    const char* mono = "monodromy operator of a periodic orbit is unitary";
    {
        auto x = freezing_point(3);
        FlowOptions opt;
        opt.step = 1e-2;
        auto orbit = flow(x, {FlowSegment::single(2, 1.0)}, opt);
        out.push_back(bound("M M^dagger = 1 at the stationary point", mono, {{"n", 3}, {"N", 2}},
                            unitarity_defect(monodromy(orbit, 2)), 1e-8));
    }
    {
        PhasePoint x{{0.0, 0.0}, {1.0, -1.0}};
        const double T = 2 * pi / std::sqrt(hamiltonian(2, x));
        FlowOptions opt;
        opt.step = T / 4000;
        auto orbit = flow(x, {FlowSegment::single(2, T)}, opt);
        out.push_back(bound("M M^dagger = 1 on the two-body periodic orbit", mono, {{"n", 2}, {"N", 2}, {"T", T}},
                            unitarity_defect(monodromy(orbit, 2)), 1e-8));
    }
    return out;
}

WKBProblem wkb_case(const std::string& name) {
    if (name == "free-gaussian") {
        auto H1 = [](double p, double) -> CMatrix { return 0.3 * sz() + p * 0.5 * sx(); };
        return WKBProblem::kinetic(Smooth::constant(0), H1, Smooth::linear(0.8), gaussian_spinor(), 2);
    }
    if (name == "cosine") {
        auto H1 = [](double p, double q) -> CMatrix { return 0.5 * std::cos(q) * sx() + 0.3 * sz() + p * 0.4 * sy(); };
        return WKBProblem::kinetic(Smooth::cosine(1.0), H1, Smooth::linear(1.0), gaussian_spinor(), 2);
    }
    throw std::invalid_argument("unknown WKB case '" + name + "' (expected free-gaussian or cosine)");
}

ConvergenceStudy wkb_convergence(const WKBProblem& pr, const std::vector<double>& hbars, double t,
                                 int reference_steps) {
    if (hbars.size() < 2) throw std::invalid_argument("a convergence study needs at least two hbar values");
    auto semi = assemble(pr, kWKBGrid, t, hbars);
    ConvergenceStudy st;
    for (std::size_t h = 0; h < hbars.size(); ++h)
        st.rows.push_back(
            {hbars[h], relative_l2_error(semi[h], reference_solve(pr, kWKBGrid, hbars[h], t, reference_steps))});
    st.order = fitted_order(st.rows);
    return st;
}

std::vector<Report> wkb(const std::vector<double>& hbars, double min_order) {
    std::vector<Report> out;
    const char* thm = "matrix WKB asymptotics away from caustics";
    for (const char* name : {"free-gaussian", "cosine"}) {
        auto st = wkb_convergence(wkb_case(name), hbars, 1.0);
        nlohmann::json w = st;
        out.push_back({"L2 error is O(hbar)", thm, {{"case", name}, {"hbar", hbars}, {"min_order", min_order}},
                       st.order >= min_order, w});
    }
    auto pr = wkb_case("cosine");
    double hj = 0;
    for (double q : {-1.5, 0.2, 1.7}) hj = std::max(hj, hj_residual(pr, q, 1.0, 1e-3));
    out.push_back(bound("dS/dt + H0(dS/dq, q) = 0", "Hamilton-Jacobi equation for the branch action",
                        {{"case", "cosine"}, {"q", {-1.5, 0.2, 1.7}}, {"t", 1.0}}, hj, 1e-5));
    PhasePoint x{{0.4, -0.3}, {0.2, 2.5}};
    auto sheet = [](const PhasePoint& y) { return 0.3 * std::cos(y.q[0]); };
    const double T2 = 0.8, T3 = 0.6;
    const double a = multitime_action(x, {FlowSegment::single(2, T2), FlowSegment::single(3, T3)}, 1e-3, sheet);
    const double b = multitime_action(x, {FlowSegment::single(3, T3), FlowSegment::single(2, T2)}, 1e-3, sheet);
    const double c = multitime_action(x, {FlowSegment{{{2, T2}, {3, T3}}, 1.0}}, 1e-3, sheet);
    out.push_back(bound("multi-time action is path independent on the (t_2, t_3) sheet",
                        "multi-time Hamilton-Jacobi action", {{"n", 2}, {"T2", T2}, {"T3", T3}},
                        std::max({std::abs(a - c), std::abs(b - c), std::abs(a - b)}), 1e-6));
    return out;
}

std::vector<Report> rmatrix(int N, double tol) {
    auto fam = yang_r(N);
    const std::vector<double> grid{-1.7, -0.6, 0.45, 1.3, 2.9};
    std::vector<Report> out;
    for (double h : {0.1, 0.5}) {
        double worst = 0;
        for (double u : grid)
            for (double v : grid)
                if (std::abs(u + v) > 1e-9) worst = std::max(worst, qybe_residual(fam, u, v, h));
        out.push_back(bound("R12 R13 R23 = R23 R13 R12", "quantum Yang-Baxter relations", {{"N", N}, {"hbar", h}, {"grid", grid}},
                            worst, tol));
    }
    double cy = 0;
    for (double u : grid)
        for (double v : grid)
            if (std::abs(u + v) > 1e-9) cy = std::max(cy, cybe_residual(fam, u, v));
    out.push_back(bound("[r12, r13] + [r12, r23] + [r13, r23] = 0", "classical Yang-Baxter relations",
                        {{"N", N}, {"grid", grid}}, cy, tol));
    Report prop = unitarity_proposition_check(fam, grid, tol);
    out.push_back(prop);

    // negative controls: each must be detected
    std::mt19937_64 rng(29);
    std::normal_distribution<double> g;
    CMatrix E(N * N, N * N);
    for (Eigen::Index a = 0; a < E.rows(); ++a)
        for (Eigen::Index b = 0; b < E.cols(); ++b) E(a, b) = cplx(g(rng), g(rng));
    RMatrixFamily perturbed = fam;
    perturbed.R = [fam, E](double u, double h) -> CMatrix { return fam.R(u, h) + 1e-4 * E; };
    out.push_back(exceeds("perturbed R violates QYBE", "quantum Yang-Baxter relations", {{"N", N}, {"eps", 1e-4}},
                          qybe_residual(perturbed, 1.3, 0.7, 0.2), 1e-7));
    CMatrix D = CMatrix::Zero(N * N, N * N);
    D(0, 0) = 1;
    auto twisted = [&](double u) -> CMatrix { return fam.r(u) + D * u; };
    out.push_back(exceeds("twisted r violates CYBE", "classical Yang-Baxter relations", {{"N", N}},
                          cybe_residual(twisted, N, 1.1, 0.4), 1e-3));
    CMatrix S = CMatrix::Zero(N * N, N * N);
    S(0, 0) = 1;
    S(N * N - 1, N * N - 1) = -1;
    RMatrixFamily with_s = fam;
    with_s.R = [fam, S](double u, double h) -> CMatrix { return fam.R(u, h) + h * h * S / (u * u); };
    Report neg = unitarity_proposition_check(with_s, {0.7, 1.4}, tol);
    out.push_back({"ad hoc s fails the unitarity proposition", prop.anchor, {{"N", N}}, !neg.pass, neg.witness});
    return out;
}

}  // namespace cmslab::suites
