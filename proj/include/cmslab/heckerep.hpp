#pragma once

// Operator algebra generated by coordinates, momenta and coordinate permutations,
// kept in normal order f(z) p^alpha K_w.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmslab/exactfun.hpp"
#include "cmslab/report.hpp"
#include "cmslab/spinspace.hpp"

namespace cmslab {

class CostGuardError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Adjacent transpositions s_a = (a, a+1), 0-based a, with w = s_{a1} o s_{a2} o ...
std::vector<int> reduced_word(const SiteMap& w);
SiteMap from_word(int n, const std::vector<int>& word);

using Alpha = std::vector<int>;

struct TermKey {
    Alpha alpha;  // exponents of p-hat; all zero for the semiclassical kind
    SiteMap w;
    friend bool operator<(const TermKey& a, const TermKey& b) {
        return a.alpha != b.alpha ? a.alpha < b.alpha : a.w < b.w;
    }
    friend bool operator==(const TermKey& a, const TermKey& b) { return a.alpha == b.alpha && a.w == b.w; }
};

enum class OpKind { Quantum, Semiclassical };

/// Quantum: sum f(z; hbar, lambda) p^alpha K_w with p_i = hbar z_i d/dz_i.
/// Semiclassical: sum f(p, z; lambda) K_w.
class NormalOrderedOperator {
public:
    using Terms = std::map<TermKey, RationalFunction>;

    NormalOrderedOperator(OpKind kind, int n);
    static NormalOrderedOperator scalar(OpKind kind, int n, const RationalFunction& f);
    static NormalOrderedOperator permutation(OpKind kind, int n, const SiteMap& w);
    static NormalOrderedOperator transposition(OpKind kind, int n, int i, int j);  // 1-based
    static NormalOrderedOperator momentum(OpKind kind, int n, int i);              // 1-based
    static NormalOrderedOperator coordinate(OpKind kind, int n, int i);            // 1-based

    OpKind kind() const { return kind_; }
    int sites() const { return n_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    RationalFunction coefficient(const Alpha& alpha, const SiteMap& w) const;
    RationalFunction coefficient(const SiteMap& w) const { return coefficient(Alpha(n_, 0), w); }

    void add_term(const TermKey& key, const RationalFunction& f);

    NormalOrderedOperator& operator+=(const NormalOrderedOperator& o);
    NormalOrderedOperator& operator-=(const NormalOrderedOperator& o);
    NormalOrderedOperator& operator*=(const RationalFunction& f);  // left multiplication by a function
    friend NormalOrderedOperator operator+(NormalOrderedOperator a, const NormalOrderedOperator& b) { return a += b; }
    friend NormalOrderedOperator operator-(NormalOrderedOperator a, const NormalOrderedOperator& b) { return a -= b; }
    friend NormalOrderedOperator operator*(const RationalFunction& f, NormalOrderedOperator a) { return a *= f; }
    friend NormalOrderedOperator operator*(const NormalOrderedOperator& a, const NormalOrderedOperator& b);

    std::string str() const;

private:
    void check(const NormalOrderedOperator& o) const;

    OpKind kind_;
    int n_;
    Terms terms_;
};

NormalOrderedOperator op_multiply(const NormalOrderedOperator& a, const NormalOrderedOperator& b);
NormalOrderedOperator op_commutator(const NormalOrderedOperator& a, const NormalOrderedOperator& b);
NormalOrderedOperator op_power(const NormalOrderedOperator& a, int k);

NormalOrderedOperator dunkl_quantum(int j, int n);
NormalOrderedOperator dunkl_classical(int j, int n);
/// The semiclassical operator with the sign pattern of the sums read with j as the
/// summation index; kept to demonstrate that it breaks the Hecke relations.
NormalOrderedOperator dunkl_classical_literal(int j, int n);
NormalOrderedOperator dunkl(OpKind kind, int j, int n);

/// (1/k) sum_i d_i^k. Exact mode is guarded to n <= 4, k <= 4.
NormalOrderedOperator symmetric_hamiltonian(int k, int n, OpKind kind);

/// Spin-valued differential operator: key (alpha, sigma) stands for f p^alpha P_sigma.
struct RestrictedOperator {
    int n = 0;
    NormalOrderedOperator::Terms terms;
    RationalFunction coefficient(const Alpha& alpha, const SiteMap& sigma) const;
    bool operator==(const RestrictedOperator& o) const;
};

/// How K_w is traded for spin permutations on the restricted space.
/// Symmetric: K_w -> P_{w^-1}. Antisymmetric: K_w -> sgn(w) P_{w^-1}.
enum class Exchange { Symmetric, Antisymmetric };

/// The exchange rule under which the displayed H_2 and H_3 come out term by term.
inline constexpr Exchange kDisplayedExchange = Exchange::Antisymmetric;

int permutation_sign(const SiteMap& w);

RestrictedOperator restrict_to_symmetric(const NormalOrderedOperator& a, Exchange e = kDisplayedExchange);

struct SemiclassicalSplit {
    RationalFunction h0;                        // function of (p, z)
    std::map<SiteMap, RationalFunction> h1;     // sigma -> coefficient of P_sigma
};

/// Thrown when the hbar^0 part carries a nontrivial permutation.
class UnityViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// p-hat^alpha -> p^alpha, then split off hbar^0 and hbar^1.
SemiclassicalSplit semiclassical_split(const RestrictedOperator& a);

/// Weyl symbol at first order: h1 + (i/2) sum_i d/dp_i d/dq_i h0 on the identity word.
SemiclassicalSplit weyl_symbol(const SemiclassicalSplit& s);

/// (1/k) tr L^k with L = diag(p) + (z_i / (z_i - z_j)).
RationalFunction lax_power_trace(int k, int n);

/// Exact det(lambda + L) at an exact point.
GaussianRational lax_determinant(const std::vector<GaussianRational>& p, const std::vector<GaussianRational>& z,
                                 const GaussianRational& lambda);

/// Product (lambda + D_1) ... (lambda + D_n), semiclassical, lambda formal.
NormalOrderedOperator generating_operator(int n);

std::vector<Report> classical_generating_check(int n, int samples, unsigned long seed);

/// Hecke relations, commutation with coordinates and the cancellation identity.
std::vector<Report> hecke_suite(int n, OpKind kind);
std::vector<Report> kcancel_suite(int n);

/// Float evaluation of a spin-valued coefficient table.
class CompiledSpinField {
public:
    CompiledSpinField() = default;
    CompiledSpinField(int n, const std::map<SiteMap, RationalFunction>& table);
    SpinOperator operator()(const std::vector<double>& p, const std::vector<cplx>& z, int N) const;

private:
    int n_ = 0;
    std::vector<std::pair<SiteMap, CompiledRational>> terms_;
};

/// First nonzero coefficient as text, or null.
nlohmann::json first_nonzero(const NormalOrderedOperator& a);

}  // namespace cmslab
