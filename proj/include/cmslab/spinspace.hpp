#pragma once

// Vectors and operators on the n-fold tensor power of C^N.
// Basis index of e_{a_1} x ... x e_{a_n} is sum_i a_i N^(i-1): site 1 varies fastest.

#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace cmslab {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Largest N^n for which dense matrices are built.
inline constexpr std::size_t kMaxDenseDim = 4096;

std::size_t spin_dim(int n, int N);

/// Site map of a permutation, 0-based: sigma[i] is the image of site i.
using SiteMap = std::vector<int>;

SiteMap identity_map(int n);
SiteMap transposition_map(int n, int i, int j);
SiteMap compose(const SiteMap& a, const SiteMap& b);  // (a o b)(i) = a(b(i))
SiteMap inverse(const SiteMap& a);

/// out = P_sigma in, where P_sigma e_a = e_b with b_{sigma(i)} = a_i.
void apply_permutation_serial(const SiteMap& sigma, int n, int N, const cplx* in, cplx* out);
/// Same map, OpenMP-parallel over output amplitudes.
void apply_permutation(const SiteMap& sigma, int n, int N, const cplx* in, cplx* out);
/// Accumulating variant: out += w * P_sigma in.
void accumulate_permutation(const SiteMap& sigma, cplx w, int n, int N, const cplx* in, cplx* out);

class SpinVector {
public:
    SpinVector(int n, int N);
    SpinVector(int n, int N, CVector amp);
    static SpinVector basis(int n, int N, const std::vector<int>& digits);
    static SpinVector random(int n, int N, std::mt19937_64& rng);

    int sites() const { return n_; }
    int local_dim() const { return N_; }
    std::size_t dim() const { return static_cast<std::size_t>(amp_.size()); }
    const CVector& amplitudes() const { return amp_; }
    CVector& amplitudes() { return amp_; }
    double norm() const { return amp_.norm(); }
    cplx dot(const SpinVector& o) const;  // <this|o>

private:
    int n_, N_;
    CVector amp_;
};

struct WeightedWord {
    cplx weight;
    SiteMap sigma;
};

/// Either a dense matrix or a lazy sum of weighted permutation operators.
class SpinOperator {
public:
    SpinOperator(int n, int N);  // zero, lazy form
    static SpinOperator identity(int n, int N);
    static SpinOperator dense(int n, int N, CMatrix m);
    static SpinOperator words(int n, int N, std::vector<WeightedWord> w);
    static SpinOperator permutation(int n, int N, const SiteMap& sigma);

    int sites() const { return n_; }
    int local_dim() const { return N_; }
    std::size_t dim() const { return spin_dim(n_, N_); }
    bool is_dense() const { return dense_; }
    const std::vector<WeightedWord>& word_list() const { return words_; }
    /// Materialized matrix; throws beyond kMaxDenseDim.
    CMatrix to_dense() const;

    SpinVector apply(const SpinVector& v) const;
    SpinVector apply_serial(const SpinVector& v) const;

    SpinOperator& operator+=(const SpinOperator& o);
    SpinOperator& operator-=(const SpinOperator& o);
    SpinOperator& operator*=(cplx c);
    friend SpinOperator operator+(SpinOperator a, const SpinOperator& b) { return a += b; }
    friend SpinOperator operator-(SpinOperator a, const SpinOperator& b) { return a -= b; }
    friend SpinOperator operator*(SpinOperator a, cplx c) { return a *= c; }
    friend SpinOperator operator*(cplx c, SpinOperator a) { return a *= c; }
    friend SpinOperator operator*(const SpinOperator& a, const SpinOperator& b);
    SpinOperator adjoint() const;

private:
    void check_same(const SpinOperator& o) const;
    void simplify();

    int n_, N_;
    bool dense_ = false;
    CMatrix mat_;
    std::vector<WeightedWord> words_;
};

SpinOperator permutation_op(int i, int j, int n, int N);  // 1-based sites
SpinVector apply(const SpinOperator& op, const SpinVector& v);
SpinOperator commutator(const SpinOperator& a, const SpinOperator& b);
double op_norm(const SpinOperator& a);
bool is_hermitian(const SpinOperator& a, double tol);

void to_json(nlohmann::json& j, const SpinVector& v);
void to_json(nlohmann::json& j, const SpinOperator& op);
SpinVector spin_vector_from_json(const nlohmann::json& j);
SpinOperator spin_operator_from_json(const nlohmann::json& j);

}  // namespace cmslab
