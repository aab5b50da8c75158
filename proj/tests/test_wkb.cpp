#include "cmslab/wkb.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

using namespace cmslab;

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0, 1);

CMatrix sx() { return (CMatrix(2, 2) << 0, 1, 1, 0).finished(); }
CMatrix sy() { return (CMatrix(2, 2) << 0, -I, I, 0).finished(); }
CMatrix sz() { return (CMatrix(2, 2) << 1, 0, 0, -1).finished(); }

CMatrix expmi(const CMatrix& A, double s) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(A);
    CVector ph = (-I * s * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

std::function<CVector(double)> gaussian_profile(double width, CVector v) {
    return [=](double q) -> CVector { return std::exp(-q * q / (2 * width * width)) * v; };
}

CVector spinor() { return (CVector(2) << 0.8, 0.6 * I).finished(); }

WKBProblem free_problem(double a, std::function<CMatrix(double, double)> H1, int N = 1) {
    CVector v = N == 1 ? CVector::Ones(1) : spinor();
    return WKBProblem::kinetic(Smooth::constant(0), std::move(H1), Smooth::linear(a), gaussian_profile(1.0, v), N);
}

std::function<CMatrix(double, double)> zero_h1(int N) {
    return [N](double, double) -> CMatrix { return CMatrix::Zero(N, N); };
}

WKBProblem cosine_problem() {
    auto H1 = [](double p, double q) -> CMatrix { return 0.5 * std::cos(q) * sx() + 0.3 * sz() + p * 0.4 * sy(); };
    return WKBProblem::kinetic(Smooth::cosine(1.0), H1, Smooth::linear(1.0), gaussian_profile(1.0, spinor()), 2);
}

}  // namespace

// Branches

TEST(Shoot, FreeStreaming) {
    auto pr = free_problem(0.7, zero_h1(1));
    auto bs = shoot(pr, 1.3, 2.0);
    ASSERT_EQ(bs.size(), 1u);
    EXPECT_NEAR(bs[0].q0, 1.3 - 0.7 * 2.0, 1e-12);
    EXPECT_NEAR(bs[0].S, 0.7 * 1.3 - 0.49 * 2.0 / 2, 1e-12);
    EXPECT_NEAR(bs[0].D, 1.0, 1e-12);
    EXPECT_EQ(bs[0].mu, 0);
    EXPECT_LT((bs[0].Psi - pr.phi(bs[0].q0)).norm(), 1e-14);
}

TEST(Shoot, ZeroTimeIsInitialData) {
    auto pr = cosine_problem();
    auto bs = shoot(pr, 0.4, 0.0);
    ASSERT_EQ(bs.size(), 1u);
    EXPECT_EQ(bs[0].q0, 0.4);
    EXPECT_EQ(bs[0].S, pr.f(0.4));
    EXPECT_EQ(bs[0].D, 1.0);
    EXPECT_EQ(bs[0].mu, 0);
}

TEST(Shoot, FocusingBeamBranchesAndMaslov) {
    auto pr = WKBProblem::kinetic(Smooth::constant(0), zero_h1(1), Smooth::cosine(1.0), gaussian_profile(0.7, CVector::Ones(1)), 1);
    pr.support_lo = -pi;
    pr.support_hi = pi;
    EXPECT_EQ(shoot(pr, 0.05, 0.5).size(), 1u);
    auto bs = shoot(pr, 0.05, 1.5);
    ASSERT_EQ(bs.size(), 3u);
    int focused = 0;
    for (const auto& b : bs) {
        // q = q0 - t sin q0, so dq/dq0 = 1 - t cos q0
        EXPECT_NEAR(b.endpoint(), 0.05, 1e-11);
        EXPECT_NEAR(b.jacobian(), 1 - 1.5 * std::cos(b.q0), 1e-9);
        EXPECT_NEAR(b.D * b.D * std::abs(b.jacobian()), 1.0, 1e-12);
        if (b.mu == 1) ++focused;
        EXPECT_EQ(b.mu, b.jacobian() < 0 ? 1 : 0);
    }
    EXPECT_EQ(focused, 1);
}

TEST(Action, GradientIsFinalMomentum) {
    auto pr = cosine_problem();
    const double t = 1.0, d = 1e-4;
    for (int i = 0; i < 10; ++i) {
        const double q = -2.0 + 0.45 * i;
        auto bs = shoot(pr, q, t);
        ASSERT_EQ(bs.size(), 1u);
        double Sq = (shoot(pr, q + d, t)[0].S - shoot(pr, q - d, t)[0].S) / (2 * d);
        EXPECT_NEAR(Sq, bs[0].p.back(), 1e-5 * std::abs(bs[0].p.back()));
    }
}

TEST(Action, HamiltonJacobiResidual) {
    auto pr = cosine_problem();
    for (double q : {-1.5, 0.2, 1.7}) EXPECT_LT(hj_residual(pr, q, 1.0, 1e-3), 1e-5) << q;
}

TEST(Action, SimpsonNeedsEvenIntervals) {
    auto pr = cosine_problem();
    EXPECT_THROW(integrate_branch(pr, 0.0, 1.0, 7), std::invalid_argument);
}

// Transport along branches

TEST(TransportVector, ConstantGenerator) {
    CMatrix C = 0.7 * sx() + 0.2 * sz();
    auto pr = free_problem(0.5, [C](double, double) { return C; }, 2);
    auto bs = shoot(pr, 0.3, 1.2);
    ASSERT_EQ(bs.size(), 1u);
    EXPECT_LT((bs[0].Psi - expmi(C, 1.2) * pr.phi(bs[0].q0)).norm(), 1e-10);
}

TEST(TransportVector, MomentumProfileOnFreeFlow) {
    auto pr = free_problem(0.9, [](double p, double) -> CMatrix { return p * sy(); }, 2);
    auto bs = shoot(pr, -0.4, 1.5);
    ASSERT_EQ(bs.size(), 1u);
    EXPECT_LT((bs[0].Psi - expmi(0.9 * sy(), 1.5) * pr.phi(bs[0].q0)).norm(), 1e-10);
}

// Reference solver

TEST(Reference, FreeGaussianIsExact) {
    const double a = 0.8, hbar = 0.1, t = 1.5, s = 1.0;
    auto pr = WKBProblem::kinetic(Smooth::constant(0), zero_h1(1), Smooth::linear(a),
                                  gaussian_profile(s, CVector::Ones(1)), 1);
    PeriodicGrid g{-20, 40, 2048};
    auto w = reference_solve(pr, g, hbar, t, 7);
    double err = 0, nrm = 0;
    for (int i = 0; i < g.M; ++i) {
        const double q = g.point(i);
        const cplx c = s * s + I * hbar * t;
        cplx exact = s / std::sqrt(c) * std::exp(-(q - a * t) * (q - a * t) / (2.0 * c)) *
                     std::exp(I * (a * q - a * a * t / 2) / hbar);
        err += std::norm(w.psi(i, 0) - exact);
        nrm += std::norm(exact);
    }
    EXPECT_LT(std::sqrt(err / nrm), 1e-8);
}

TEST(Reference, SecondOrderSelfConvergence) {
    auto pr = cosine_problem();
    PeriodicGrid g{-8 * pi, 16 * pi, 2048};
    auto a = reference_solve(pr, g, 0.1, 1.0, 50), b = reference_solve(pr, g, 0.1, 1.0, 100),
         c = reference_solve(pr, g, 0.1, 1.0, 200);
    const double factor = (a.psi - b.psi).norm() / (b.psi - c.psi).norm();
    EXPECT_GT(factor, 3.9);
    EXPECT_LT(factor, 4.1);
}

TEST(Reference, Guards) {
    auto pr = cosine_problem();
    auto quartic = pr;
    quartic.A[4] = Smooth::constant(0.1);
    EXPECT_THROW(reference_solve(quartic, {-8 * pi, 16 * pi, 1024}, 0.1, 1.0, 10), std::invalid_argument);
    auto curved = pr;
    curved.H1 = [](double p, double q) -> CMatrix { return p * p * sx() + std::cos(q) * sz(); };
    EXPECT_THROW(reference_solve(curved, {-8 * pi, 16 * pi, 1024}, 0.1, 1.0, 10), std::invalid_argument);
    EXPECT_THROW(reference_solve(pr, {-8 * pi, 16 * pi, 128}, 0.01, 1.0, 10), NumericalGuardError);
}

TEST(Kernels, PointwiseParallelMatchesSerial) {
    std::vector<CMatrix> U;
    CMatrix f(500, 3);
    for (int i = 0; i < 500; ++i) {
        U.push_back(expmi(std::cos(0.1 * i) * CMatrix::Identity(3, 3) + CMatrix::Constant(3, 3, 0.01 * i), 0.3));
        for (int c = 0; c < 3; ++c) f(i, c) = cplx(std::sin(i + c), std::cos(2 * i - c));
    }
    CMatrix g = f;
    apply_pointwise(U, f);
    apply_pointwise_serial(U, g);
    EXPECT_EQ((f - g).norm(), 0.0);
}

TEST(Kernels, AssemblyParallelMatchesSerial) {
    auto pr = cosine_problem();
    PeriodicGrid g{-8 * pi, 16 * pi, 256};
    auto a = assemble(pr, g, 0.8, {0.1, 0.05});
    auto b = assemble_serial(pr, g, 0.8, {0.1, 0.05});
    for (int h = 0; h < 2; ++h) {
        EXPECT_EQ((a[h].psi - b[h].psi).norm(), 0.0);
        EXPECT_EQ(a[h].valid, b[h].valid);
    }
}

// Semiclassical asymptotics against the reference

TEST(Asymptotics, AssembledMatchesInitialDataAtZeroTime) {
    auto pr = cosine_problem();
    PeriodicGrid g{-8 * pi, 16 * pi, 512};
    auto w = assemble(pr, g, 0.0, {0.1})[0];
    for (int i = 0; i < g.M; ++i) {
        const double q = g.point(i);
        CVector psi0 = std::exp(I * pr.f(q) / 0.1) * pr.phi(q);
        if (q >= pr.support_lo && q <= pr.support_hi)
            EXPECT_LT((w.psi.row(i).transpose() - psi0).norm(), 1e-12);
    }
}

TEST(Asymptotics, FirstOrderInHbar) {
    const std::vector<double> hbars{0.2, 0.1, 0.05, 0.025};
    CMatrix C = 0.3 * sz();
    std::vector<WKBProblem> problems{
        free_problem(0.8, [C](double p, double) -> CMatrix { return C + p * 0.5 * sx(); }, 2), cosine_problem()};
    for (const auto& pr : problems) {
        PeriodicGrid g{-8 * pi, 16 * pi, 4096};
        auto semi = assemble(pr, g, 1.0, hbars);
        std::vector<ConvergenceRow> rows;
        for (std::size_t h = 0; h < hbars.size(); ++h)
            rows.push_back({hbars[h], relative_l2_error(semi[h], reference_solve(pr, g, hbars[h], 1.0, 1000))});
        const double order = fitted_order(rows);
        EXPECT_GE(order, 0.8);
        EXPECT_LT(order, 1.3);
        for (std::size_t h = 1; h < rows.size(); ++h) {
            const double ratio = rows[h].error / rows[h - 1].error;
            EXPECT_GT(ratio, 0.35);
            EXPECT_LT(ratio, 0.65);
        }
    }
}

TEST(Asymptotics, MaslovPhaseAfterFocus) {
    auto pr = WKBProblem::kinetic(Smooth::constant(0), zero_h1(1), Smooth::cosine(1.0),
                                  gaussian_profile(0.7, CVector::Ones(1)), 1);
    pr.support_lo = -pi;
    pr.support_hi = pi;
    PeriodicGrid g{-4 * pi, 8 * pi, 4096};
    const double hbar = 0.005, t = 1.5;
    auto ref = reference_solve(pr, g, hbar, t, 3000);
    auto focal = assemble(pr, g, t, {hbar}, {}, MaslovConvention::FocalPoints)[0];
    auto literal = assemble(pr, g, t, {hbar}, {}, MaslovConvention::QuarterPlus)[0];
    // inside the focal interval, away from its fold points at |q| ~ 0.28
    for (auto* w : {&focal, &literal, &ref})
        for (int i = 0; i < g.M; ++i) w->valid[i] = std::abs(g.point(i)) < 0.12;
    const double e_focal = relative_l2_error(focal, ref), e_literal = relative_l2_error(literal, ref);
    EXPECT_LT(e_focal, 0.05);
    EXPECT_GT(e_literal, 0.3);
}

TEST(Convergence, FittedOrderAndJson) {
    std::vector<ConvergenceRow> rows{{0.2, 0.4}, {0.1, 0.2}, {0.05, 0.1}};
    EXPECT_NEAR(fitted_order(rows), 1.0, 1e-12);
    nlohmann::json j = ConvergenceStudy{rows, 1.0};
    EXPECT_EQ(j["rows"].size(), 3u);
    EXPECT_EQ(j["order_estimate"], 1.0);
}

// Multi-time action on Calogero-Moser sheets

TEST(MultiTime, PathIndependence) {
    PhasePoint x{{0.4, -0.3}, {0.2, 2.5}};
    auto sheet = [](double a) { return [a](const PhasePoint& y) { return a * std::cos(y.q[0]); }; };
    const double T2 = 0.8, T3 = 0.6;
    double L1 = multitime_action(x, {FlowSegment::single(2, T2), FlowSegment::single(3, T3)}, 1e-3, sheet(0.3));
    double L2 = multitime_action(x, {FlowSegment::single(3, T3), FlowSegment::single(2, T2)}, 1e-3, sheet(0.3));
    double diag = multitime_action(x, {FlowSegment{{{2, T2}, {3, T3}}, 1.0}}, 1e-3, sheet(0.3));
    EXPECT_LT(std::abs(L1 - diag), 1e-6);
    EXPECT_LT(std::abs(L2 - diag), 1e-6);
    double other = multitime_action(x, {FlowSegment::single(2, T2)}, 1e-3, sheet(0.3));
    EXPECT_GT(std::abs(other - diag), 1e-3);
}

TEST(MultiTime, LagrangianSheet) {
    PhasePoint x{{0.4, -0.3}, {0.2, 2.5}};
    EXPECT_LT(lagrangian_residual(x, 2, 3, 0.8, 0.6, 3, 1e-4), 1e-7);
    PhasePoint y{{0.4, -0.3, 0.1}, {0.2, 2.5, 4.4}};
    EXPECT_LT(lagrangian_residual(y, 2, 3, 0.5, 0.5, 2, 1e-4), 1e-7);
}

TEST(MultiTime, SingleTimeReducesToHamiltonJacobi) {
    // one free particle: CMS with n = 1 and H_2 = p^2/2
    auto pr = free_problem(0.6, zero_h1(1));
    auto b = shoot(pr, 1.0, 1.4)[0];
    PhasePoint x{{0.6}, {b.q0}};
    double S = multitime_action(x, {FlowSegment::single(2, 1.4)}, 1.4 / 200,
                                [&](const PhasePoint& y) { return pr.f(y.q[0]); });
    EXPECT_NEAR(S, b.S, 1e-10);
}

TEST(MultiTime, NonSolutionIsDetected) {
    PhasePoint x{{0.4, -0.3}, {0.2, 2.5}};
    FlowOptions opt;
    auto tr = flow(x, {FlowSegment::single(2, 0.2)}, opt);
    EXPECT_LT(mt_el_residual(tr), 1e-5);
    tr.x[50].p[0] += 1e-2;
    EXPECT_GT(mt_el_residual(tr), 1.0);
}

TEST(Output, CsvHeader) {
    auto pr = cosine_problem();
    auto w = assemble(pr, {-8 * pi, 16 * pi, 64}, 0.5, {0.1})[0];
    std::ostringstream os;
    write_csv(os, w);
    std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "q,re0,im0,re1,im1,valid");
}
