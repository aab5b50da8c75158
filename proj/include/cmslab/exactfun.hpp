#pragma once

// Exact arithmetic kernel: Gaussian rationals, sparse Laurent polynomials and
// multivariate rational functions in the variables z_1..z_n, p_1..p_n, hbar,
// lambda.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace cmslab {

/// Raised when a rational function is evaluated at one of its poles.
class PoleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class GaussianRational {
public:
    GaussianRational() = default;
    GaussianRational(long re) : re_(re) {}  // NOLINT(google-explicit-constructor)
    GaussianRational(mpq_class re, mpq_class im = 0);
    static GaussianRational from_string(const std::string& re, const std::string& im = "0");

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
    GaussianRational conj() const { return {re_, -im_}; }
    mpq_class norm2() const { return re_ * re_ + im_ * im_; }
    std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }
    std::string str() const;

    GaussianRational& operator+=(const GaussianRational& o);
    GaussianRational& operator-=(const GaussianRational& o);
    GaussianRational& operator*=(const GaussianRational& o);
    GaussianRational& operator/=(const GaussianRational& o);

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
    GaussianRational operator-() const { return {-re_, -im_}; }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

/// Identifies one variable. Indices are 0-based site indices.
struct Var {
    enum class Kind : std::uint8_t { Z, P, Hbar, Lambda };
    Kind kind;
    int index = 0;

    static Var z(int i) { return {Kind::Z, i}; }
    static Var p(int i) { return {Kind::P, i}; }
    static Var hbar() { return {Kind::Hbar, 0}; }
    static Var lambda() { return {Kind::Lambda, 0}; }
    std::string name() const;
};

/// Maximum site count for exact objects (2n + 2 exponent slots must fit).
inline constexpr int kMaxExactSites = 7;

/// Exponent vector laid out as z_1..z_n, p_1..p_n, hbar, lambda.
/// Negative entries are permitted in z slots only.
using Monomial = std::array<std::int8_t, 2 * kMaxExactSites + 2>;

int slot(const Var& v, int n);

/// Descending graded lexicographic order: the leading term sorts first.
struct GrLexGreater {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Assignment of values to variables. Unbound variables raise on evaluation.
template <typename Scalar>
struct Point {
    int n = 0;
    std::vector<std::optional<Scalar>> values;  // indexed by slot

    explicit Point(int sites) : n(sites), values(2 * sites + 2) {}
    Point& set(const Var& v, Scalar x) {
        values.at(slot(v, n)) = std::move(x);
        return *this;
    }
};
using ExactPoint = Point<GaussianRational>;
using FloatPoint = Point<std::complex<double>>;

class Polynomial {
public:
    using Terms = std::map<Monomial, GaussianRational, GrLexGreater>;

    explicit Polynomial(int n = 0);
    Polynomial(int n, const GaussianRational& c);
    static Polynomial variable(int n, const Var& v, int power = 1);

    int sites() const { return n_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    std::size_t size() const { return terms_.size(); }
    const Monomial& leading_monomial() const { return terms_.begin()->first; }
    const GaussianRational& leading_coefficient() const { return terms_.begin()->second; }

    void add_term(const Monomial& m, const GaussianRational& c);

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(const GaussianRational& c);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(Polynomial a, const GaussianRational& c) { return a *= c; }
    Polynomial operator-() const;
    Polynomial pow(int e) const;
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }
    /// Total order used to sort denominator factors.
    friend bool operator<(const Polynomial& a, const Polynomial& b);

    /// Multiply by the monomial m (exponents may be negative in z slots).
    Polynomial shifted(const Monomial& m) const;
    /// Componentwise minimum exponent over all terms.
    Monomial min_exponents() const;
    bool has_negative_exponents() const;

    /// Exact quotient if `divisor` divides *this, otherwise nullopt.
    /// Both operands must be genuine polynomials (no negative exponents).
    std::optional<Polynomial> divide_exact(const Polynomial& divisor) const;

    Polynomial derivative(const Var& v) const;
    /// z_i -> z_{w(i)} and p_i -> p_{w(i)}.
    Polynomial permuted(const std::vector<int>& w) const;
    /// Coefficient of v^degree, as a polynomial free of v.
    Polynomial coefficient(const Var& v, int degree) const;
    int degree_in(const Var& v) const;
    bool depends_on(const Var& v) const;
    /// Set v to an exact constant.
    Polynomial substitute(const Var& v, const GaussianRational& value) const;
    Polynomial promoted(int n) const;

    GaussianRational evaluate(const ExactPoint& pt) const;
    std::complex<double> evaluate(const FloatPoint& pt) const;

    std::string str() const;

private:
    int n_;
    Terms terms_;
};

/// Multivariate Laurent rational function N / prod F_k^{e_k}.
///
/// Canonical form: every F_k is a non-constant polynomial free of monomial
/// content with leading coefficient 1, the F_k are pairwise distinct and sorted,
/// and N is not divisible by any F_k. The numerator carries all scalar content
/// and any z-monomial denominator as negative exponents.
class RationalFunction {
public:
    using Factor = std::pair<Polynomial, int>;

    explicit RationalFunction(int n = 0);
    RationalFunction(int n, const GaussianRational& c);
    RationalFunction(const Polynomial& num);  // NOLINT(google-explicit-constructor)
    RationalFunction(const Polynomial& num, const Polynomial& den);
    static RationalFunction variable(int n, const Var& v);

    int sites() const { return n_; }
    const Polynomial& numerator() const { return num_; }
    const std::vector<Factor>& denominator_factors() const { return den_; }
    Polynomial denominator() const;
    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return den_.empty() && num_.is_constant(); }

    RationalFunction& operator+=(const RationalFunction& o);
    RationalFunction& operator-=(const RationalFunction& o);
    RationalFunction& operator*=(const RationalFunction& o);
    RationalFunction& operator/=(const RationalFunction& o);
    friend RationalFunction operator+(RationalFunction a, const RationalFunction& b) { return a += b; }
    friend RationalFunction operator-(RationalFunction a, const RationalFunction& b) { return a -= b; }
    friend RationalFunction operator*(RationalFunction a, const RationalFunction& b) { return a *= b; }
    friend RationalFunction operator/(RationalFunction a, const RationalFunction& b) { return a /= b; }
    RationalFunction operator-() const;
    RationalFunction pow(int e) const;

    /// Identical canonical forms. Use equals() for the semantic check.
    friend bool operator==(const RationalFunction& a, const RationalFunction& b);
    friend bool operator!=(const RationalFunction& a, const RationalFunction& b) { return !(a == b); }

    /// d/dv, or the Euler derivative z d/dz when `euler` is set.
    RationalFunction derive(const Var& v, bool euler = false) const;
    RationalFunction permuted(const std::vector<int>& w) const;
    /// Coefficient of v^degree; the denominator must not depend on v.
    RationalFunction coefficient(const Var& v, int degree) const;
    RationalFunction substitute(const Var& v, const GaussianRational& value) const;
    RationalFunction promoted(int n) const;
    bool depends_on(const Var& v) const;

    GaussianRational evaluate(const ExactPoint& pt) const;
    std::complex<double> evaluate(const FloatPoint& pt) const;

    /// Canonical text form: "num" or "(num)/((F1)^e1*(F2)^e2)".
    std::string str() const;

private:
    void canonicalize();
    void absorb_denominator(const Polynomial& den, const std::vector<Factor>& known);
    static std::pair<int, int> unify_sites(RationalFunction& a, RationalFunction& b);

    int n_;
    Polynomial num_;
    std::vector<Factor> den_;
};

inline std::ostream& operator<<(std::ostream& os, const RationalFunction& f) { return os << f.str(); }
inline std::ostream& operator<<(std::ostream& os, const GaussianRational& c) { return os << c.str(); }

/// True iff a - b is identically zero.
bool rf_equal(const RationalFunction& a, const RationalFunction& b);

enum class ArithOp { Add, Sub, Mul, Div };
RationalFunction rf_arith(const RationalFunction& a, const RationalFunction& b, ArithOp op);

/// Double-precision evaluator for hot loops. Built once from an exact function.
class CompiledRational {
public:
    CompiledRational() = default;
    explicit CompiledRational(const RationalFunction& f);
    /// Values indexed by slot; unused slots may hold anything.
    std::complex<double> operator()(const std::vector<std::complex<double>>& slots) const;

private:
    struct Term {
        std::complex<double> coef;
        std::vector<std::pair<int, int>> powers;  // (slot, exponent)
    };
    using Poly = std::vector<Term>;
    static Poly compile(const Polynomial& p);
    static std::complex<double> eval(const Poly& p, const std::vector<std::complex<double>>& s);

    Poly num_;
    std::vector<std::pair<Poly, int>> den_;
};

}  // namespace cmslab
