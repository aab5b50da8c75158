#include "cmslab/rmatrix.hpp"

#include <random>

#include <gtest/gtest.h>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

using namespace cmslab;

namespace {

const cplx I(0, 1);

CMatrix random_matrix(int D, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CMatrix m(D, D);
    for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b) m(a, b) = cplx(g(rng), g(rng));
    return m;
}

const std::vector<double> grid = {-1.7, -0.6, 0.45, 1.3, 2.9};

}  // namespace

TEST(Yang, IdentityAtZeroHbar) {
    auto fam = yang_r(3);
    EXPECT_EQ((fam(0.7, 0.0) - CMatrix::Identity(9, 9)).norm(), 0.0);
}

TEST(Yang, FlipSquaresToIdentity) {
    for (int N : {2, 3, 4}) {
        CMatrix P = flip(N);
        EXPECT_EQ((P * P - CMatrix::Identity(N * N, N * N)).norm(), 0.0);
        // P(e_a x e_b) = e_b x e_a with factor 1 fastest
        EXPECT_EQ(P(1 + N * 0, 0 + N * 1), cplx(1));
    }
}

TEST(Yang, BarSymmetryAndUnitarityScalar) {
    for (int N : {2, 3}) {
        auto fam = yang_r(N);
        for (double u : grid)
            for (double h : {0.1, 0.5}) {
                auto d = unitarity(fam, u, h);
                EXPECT_LE(d.symmetry, 1e-15);
                EXPECT_LE(d.defect, 1e-13);
                EXPECT_NEAR(d.f.real(), 1 - h * h / (u * u), 1e-14);
                EXPECT_NEAR(d.f.imag(), 0, 1e-15);
            }
    }
}

TEST(Yang, PoleThrows) {
    auto fam = yang_r(2);
    EXPECT_THROW(fam(0.0, 0.1), std::invalid_argument);
    EXPECT_THROW(qybe_residual(fam, 0.5, -0.5, 0.1), std::invalid_argument);
    EXPECT_THROW(cybe_residual(fam, 0.0, 0.3), std::invalid_argument);
    EXPECT_THROW(yang_r(1), std::invalid_argument);
}

TEST(Embed, MatchesKroneckerProducts) {
    std::mt19937_64 rng(3);
    const int N = 2;
    CMatrix A = random_matrix(N, rng), B = random_matrix(N, rng), Id = CMatrix::Identity(N, N);
    // little endian: factor 1 is the fastest index, so kron(B, A) acts as A on factor 1
    CMatrix AB = Eigen::kroneckerProduct(B, A);
    CMatrix e12 = embed(AB, 1, 2, N);
    CMatrix ref12 = Eigen::kroneckerProduct(Id, CMatrix(Eigen::kroneckerProduct(B, A)));
    EXPECT_LE((e12 - ref12).norm(), 1e-14);
    CMatrix e23 = embed(AB, 2, 3, N);
    CMatrix ref23 = Eigen::kroneckerProduct(CMatrix(Eigen::kroneckerProduct(B, A)), Id);
    EXPECT_LE((e23 - ref23).norm(), 1e-14);
    CMatrix e13 = embed(AB, 1, 3, N);
    CMatrix ref13 = Eigen::kroneckerProduct(B, CMatrix(Eigen::kroneckerProduct(Id, A)));
    EXPECT_LE((e13 - ref13).norm(), 1e-14);
    EXPECT_THROW(embed(AB, 2, 2, N), std::invalid_argument);
}

TEST(QYBE, SinglePoint) {
    EXPECT_LE(qybe_residual(yang_r(2), 1.3, 0.7, 0.2), 1e-13);
}

TEST(QYBE, SampleGrid) {
    for (int N : {2, 3}) {
        auto fam = yang_r(N);
        for (double h : {0.1, 0.5})
            for (double u : grid)
                for (double v : grid) {
                    if (std::abs(u + v) < 1e-9) continue;
                    EXPECT_LE(qybe_residual(fam, u, v, h), 1e-12) << N << " " << u << " " << v << " " << h;
                }
    }
}

TEST(QYBE, ZeroHbarIsExact) {
    EXPECT_EQ(qybe_residual(yang_r(3), 0.9, 0.4, 0.0), 0.0);
}

TEST(QYBE, PerturbationIsDetected) {
    std::mt19937_64 rng(11);
    auto base = yang_r(2);
    CMatrix E = random_matrix(4, rng);
    for (double eps : {1e-3, 1e-5}) {
        RMatrixFamily fam = base;
        fam.R = [base, E, eps](double u, double h) -> CMatrix { return base.R(u, h) + eps * E; };
        const double r = qybe_residual(fam, 1.3, 0.7, 0.2);
        EXPECT_GT(r, 1e-2 * eps);
        EXPECT_LT(r, 1e2 * eps);
    }
}

TEST(Semiclassical, ExtractsDeclaredTerms) {
    for (int N : {2, 3}) {
        auto fam = yang_r(N);
        for (double u : grid) {
            auto ex = semiclassical_extract(fam, u);
            EXPECT_LE((ex.r - fam.r(u)).norm(), 1e-9);
            EXPECT_LE(ex.s.norm(), 1e-8);
        }
    }
}

TEST(Semiclassical, QuadraticTermOfNonlinearFamily) {
    // R = exp(i hbar r0) has s = -(1/2) r0^2
    auto base = yang_r(2);
    RMatrixFamily fam = base;
    fam.R = [base](double u, double h) -> CMatrix { return (I * h * base.r(u)).exp(); };
    auto ex = semiclassical_extract(fam, 0.8, {0.1, 0.05, 0.025, 0.0125});
    EXPECT_LE((ex.r - base.r(0.8)).norm(), 1e-7);
    EXPECT_LE((ex.s + 0.5 * base.r(0.8) * base.r(0.8)).norm(), 1e-7);
}

TEST(Semiclassical, NonSmoothFamilyThrows) {
    auto base = yang_r(2);
    RMatrixFamily fam = base;
    fam.R = [base](double u, double h) -> CMatrix { return base.R(u, h) + std::sqrt(std::abs(h)) * CMatrix::Identity(4, 4); };
    EXPECT_THROW(semiclassical_extract(fam, 0.8), ExtrapolationError);
}

TEST(CYBE, DeclaredAndExtracted) {
    auto fam = yang_r(2);
    EXPECT_LE(cybe_residual(fam.r, 2, 1.1, 0.4), 1e-12);
    EXPECT_LE(cybe_residual(fam, 1.1, 0.4), 1e-12);
    auto fam3 = yang_r(3);
    for (double u : grid)
        for (double v : grid)
            if (std::abs(u + v) > 1e-9) EXPECT_LE(cybe_residual(fam3, u, v), 1e-12);
}

TEST(CYBE, NonSolutionDetected) {
    // r = -i P / u + a diagonal twist in one factor does not satisfy CYBE
    auto fam = yang_r(2);
    CMatrix D = CMatrix::Zero(4, 4);
    D(0, 0) = 1;
    auto r = [&](double u) -> CMatrix { return fam.r(u) + D * u; };
    EXPECT_GT(cybe_residual(r, 2, 1.1, 0.4), 1e-3);
}

TEST(Unitarity, PropositionHoldsForYang) {
    for (int N : {2, 3}) {
        auto rep = unitarity_proposition_check(yang_r(N), grid);
        EXPECT_TRUE(rep.pass) << rep.witness.dump();
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double u = grid[k];
            EXPECT_NEAR(rep.witness[k]["quarter_f2"][0].get<double>(), -1 / (2 * u * u), 1e-12);
        }
    }
}

TEST(Unitarity, AdHocQuadraticTermFails) {
    auto base = yang_r(2);
    RMatrixFamily fam = base;
    CMatrix S = CMatrix::Zero(4, 4);
    S(0, 0) = 1;
    S(3, 3) = -1;
    fam.R = [base, S](double u, double h) -> CMatrix { return base.R(u, h) + h * h * S / (u * u); };
    auto rep = unitarity_proposition_check(fam, {0.7, 1.4});
    EXPECT_FALSE(rep.pass);
}
