#include "cmslab/spinspace.hpp"

#include <gtest/gtest.h>

using namespace cmslab;

namespace {

double dist(const SpinVector& a, const SpinVector& b) { return (a.amplitudes() - b.amplitudes()).norm(); }

}  // namespace

TEST(Permutation, SwapsTensorFactors) {
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            auto v = apply(permutation_op(1, 2, 2, 3), SpinVector::basis(2, 3, {a, b}));
            EXPECT_EQ(dist(v, SpinVector::basis(2, 3, {b, a})), 0.0);
        }
}

TEST(Permutation, BasisIndexSwapThreeSites) {
    auto v = apply(permutation_op(1, 2, 3, 2), SpinVector::basis(3, 2, {1, 0, 1}));
    EXPECT_EQ(dist(v, SpinVector::basis(3, 2, {0, 1, 1})), 0.0);
}

TEST(Permutation, Involution) {
    auto P = permutation_op(1, 2, 3, 2);
    CMatrix sq = (P * P).to_dense();
    EXPECT_EQ((sq - CMatrix::Identity(8, 8)).norm(), 0.0);
}

TEST(Permutation, DisjointCommute) {
    EXPECT_EQ(op_norm(commutator(permutation_op(1, 2, 4, 2), permutation_op(3, 4, 4, 2))), 0.0);
}

TEST(Permutation, Errors) {
    EXPECT_THROW(permutation_op(1, 1, 3, 2), std::invalid_argument);
    EXPECT_THROW(permutation_op(0, 2, 3, 2), std::out_of_range);
    EXPECT_THROW(permutation_op(1, 4, 3, 2), std::out_of_range);
}

TEST(SpinOperator, IdentityAndNorm) {
    std::mt19937_64 rng(1);
    auto v = SpinVector::random(3, 2, rng);
    EXPECT_EQ(dist(apply(SpinOperator::identity(3, 2), v), v), 0.0);
    EXPECT_DOUBLE_EQ(op_norm(SpinOperator::identity(2, 2)), 2.0);
}

TEST(SpinOperator, LazyProductMatchesSequentialApplication) {
    std::mt19937_64 rng(2);
    auto P12 = permutation_op(1, 2, 3, 2), P23 = permutation_op(2, 3, 3, 2);
    auto v = SpinVector::random(3, 2, rng);
    auto seq = apply(P12, apply(P23, v));
    EXPECT_LT(dist(apply(P12 * P23, v), seq), 1e-15);
    auto dense = SpinOperator::dense(3, 2, P12.to_dense() * P23.to_dense());
    EXPECT_LT(dist(apply(dense, v), seq), 1e-15);
}

TEST(SpinOperator, CommutatorAndHermiticity) {
    auto X = permutation_op(1, 2, 3, 2) + permutation_op(1, 3, 3, 2) * cplx(0.5);
    EXPECT_EQ(op_norm(commutator(X, X)), 0.0);
    EXPECT_TRUE(is_hermitian(permutation_op(1, 2, 3, 3), 0.0));
    auto cyc = permutation_op(1, 2, 3, 2) * permutation_op(2, 3, 3, 2);
    EXPECT_FALSE(is_hermitian(cyc, 1e-12));
    EXPECT_THROW(commutator(X, permutation_op(1, 2, 2, 2)), std::invalid_argument);
}

TEST(SpinOperator, DenseGuard) {
    EXPECT_THROW(SpinOperator::identity(13, 2).to_dense(), std::length_error);
    std::mt19937_64 rng(3);
    auto v = SpinVector::random(13, 2, rng);
    EXPECT_LT(dist(apply(SpinOperator::identity(13, 2), v), v), 1e-15);
}

TEST(SpinOperator, JsonRoundTrip) {
    auto op = permutation_op(1, 3, 3, 2) * cplx(0.25, -1.0) + SpinOperator::identity(3, 2);
    nlohmann::json j = op;
    auto back = spin_operator_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ((back.to_dense() - op.to_dense()).norm(), 0.0);
    auto dense = SpinOperator::dense(2, 2, op.to_dense().topLeftCorner(4, 4));
    nlohmann::json jd = dense;
    EXPECT_EQ((spin_operator_from_json(jd).to_dense() - dense.to_dense()).norm(), 0.0);
    std::mt19937_64 rng(4);
    auto v = SpinVector::random(2, 3, rng);
    nlohmann::json jv = v;
    EXPECT_EQ(dist(spin_vector_from_json(jv), v), 0.0);
}

// Properties

TEST(SpinProperty, TranspositionConjugation) {
    for (int N : {2, 3})
        for (int n = 3; n <= 5; ++n) {
            if (spin_dim(n, N) > kMaxDenseDim) continue;
            for (int i = 1; i <= n; ++i)
                for (int j = 1; j <= n; ++j)
                    for (int k = 1; k <= n; ++k) {
                        if (i == j || j == k || i == k) continue;
                        CMatrix lhs = (permutation_op(i, j, n, N) * permutation_op(j, k, n, N) * permutation_op(i, j, n, N))
                                          .to_dense();
                        CMatrix rhs = permutation_op(i, k, n, N).to_dense();
                        ASSERT_EQ((lhs - rhs).norm(), 0.0) << n << " " << N << " " << i << j << k;
                    }
        }
}

TEST(SpinProperty, LazyMatchesDense) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + trial % 4, N = 2 + trial % 2;
        std::vector<WeightedWord> ws;
        for (int m = 0; m < 4; ++m) {
            SiteMap s = identity_map(n);
            std::shuffle(s.begin(), s.end(), rng);
            ws.push_back({{u(rng), u(rng)}, s});
        }
        auto op = SpinOperator::words(n, N, ws);
        auto v = SpinVector::random(n, N, rng);
        CVector dense = op.to_dense() * v.amplitudes();
        EXPECT_LT((op.apply(v).amplitudes() - dense).norm(), 1e-13);
        EXPECT_LT((op.apply_serial(v).amplitudes() - dense).norm(), 1e-13);
    }
}

TEST(SpinProperty, WordProductIsHomomorphism) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        SiteMap a = identity_map(4), b = identity_map(4);
        std::shuffle(a.begin(), a.end(), rng);
        std::shuffle(b.begin(), b.end(), rng);
        CMatrix lhs = SpinOperator::permutation(4, 2, a).to_dense() * SpinOperator::permutation(4, 2, b).to_dense();
        CMatrix rhs = SpinOperator::permutation(4, 2, compose(a, b)).to_dense();
        EXPECT_EQ((lhs - rhs).norm(), 0.0);
    }
}
