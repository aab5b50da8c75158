#include "cmslab/exactfun.hpp"

#include <algorithm>
#include <sstream>

namespace cmslab {

// ---------------------------------------------------------------------------
// GaussianRational

GaussianRational::GaussianRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
}

GaussianRational GaussianRational::from_string(const std::string& re, const std::string& im) {
    return {mpq_class(re), mpq_class(im)};
}

std::string GaussianRational::str() const {
    if (sgn(im_) == 0) return re_.get_str();
    if (sgn(re_) == 0) return im_.get_str() + "i";
    std::string s = "(" + re_.get_str();
    if (sgn(im_) > 0) s += "+";
    return s + im_.get_str() + "i)";
}

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
        re_ *= o.re_;
        return *this;
    }
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
    if (o.is_zero()) throw std::domain_error("GaussianRational: division by zero");
    if (sgn(o.im_) == 0) {
        re_ /= o.re_;
        im_ /= o.re_;
        return *this;
    }
    mpq_class d = o.norm2();
    *this *= o.conj();
    re_ /= d;
    im_ /= d;
    return *this;
}

// ---------------------------------------------------------------------------
// Variables and monomials

std::string Var::name() const {
    switch (kind) {
        case Kind::Z: return "z" + std::to_string(index + 1);
        case Kind::P: return "p" + std::to_string(index + 1);
        case Kind::Hbar: return "h";
        case Kind::Lambda: return "l";
    }
    return "?";
}

int slot(const Var& v, int n) {
    switch (v.kind) {
        case Var::Kind::Z:
        case Var::Kind::P:
            if (v.index < 0 || v.index >= n)
                throw std::out_of_range("unknown variable " + v.name() + " for n=" + std::to_string(n));
            return v.kind == Var::Kind::Z ? v.index : n + v.index;
        case Var::Kind::Hbar: return 2 * n;
        case Var::Kind::Lambda: return 2 * n + 1;
    }
    throw std::logic_error("bad variable kind");
}

namespace {

int total_degree(const Monomial& m) {
    int d = 0;
    for (auto e : m) d += e;
    return d;
}

std::string slot_name(int s, int n) {
    if (s < n) return "z" + std::to_string(s + 1);
    if (s < 2 * n) return "p" + std::to_string(s - n + 1);
    return s == 2 * n ? "h" : "l";
}

void check_sites(int n) {
    if (n < 0 || n > kMaxExactSites)
        throw std::invalid_argument("exact objects support at most " + std::to_string(kMaxExactSites) +
                                    " sites, got " + std::to_string(n));
}

}  // namespace

bool GrLexGreater::operator()(const Monomial& a, const Monomial& b) const {
    int da = total_degree(a), db = total_degree(b);
    if (da != db) return da > db;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k] != b[k]) return a[k] > b[k];
    return false;
}

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(int n) : n_(n) { check_sites(n); }

Polynomial::Polynomial(int n, const GaussianRational& c) : Polynomial(n) {
    if (!c.is_zero()) terms_.emplace(Monomial{}, c);
}

Polynomial Polynomial::variable(int n, const Var& v, int power) {
    Polynomial p(n);
    Monomial m{};
    m[slot(v, n)] = static_cast<std::int8_t>(power);
    p.terms_.emplace(m, GaussianRational(1));
    return p;
}

bool Polynomial::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Monomial{});
}

void Polynomial::add_term(const Monomial& m, const GaussianRational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(const GaussianRational& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("Polynomial: site count mismatch");
    Polynomial r(a.n_);
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) {
            Monomial m;
            for (std::size_t k = 0; k < m.size(); ++k) m[k] = static_cast<std::int8_t>(ma[k] + mb[k]);
            r.add_term(m, ca * cb);
        }
    }
    return r;
}

Polynomial Polynomial::operator-() const {
    Polynomial r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
}

Polynomial Polynomial::pow(int e) const {
    if (e < 0) throw std::invalid_argument("Polynomial::pow: negative exponent");
    Polynomial r(n_, GaussianRational(1));
    Polynomial base = *this;
    while (e > 0) {
        if (e & 1) r = r * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return r;
}

bool operator<(const Polynomial& a, const Polynomial& b) {
    auto ia = a.terms_.begin(), ib = b.terms_.begin();
    GrLexGreater gt;
    for (; ia != a.terms_.end() && ib != b.terms_.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return gt(ia->first, ib->first);
        const auto& ca = ia->second;
        const auto& cb = ib->second;
        if (ca.re() != cb.re()) return ca.re() < cb.re();
        if (ca.im() != cb.im()) return ca.im() < cb.im();
    }
    return ia == a.terms_.end() && ib != b.terms_.end();
}

Polynomial Polynomial::shifted(const Monomial& s) const {
    Polynomial r(n_);
    for (const auto& [m, c] : terms_) {
        Monomial t;
        for (std::size_t k = 0; k < t.size(); ++k) t[k] = static_cast<std::int8_t>(m[k] + s[k]);
        r.terms_.emplace_hint(r.terms_.end(), t, c);  // shifting preserves the order
    }
    return r;
}

Monomial Polynomial::min_exponents() const {
    Monomial r{};
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (first) {
            r = m;
            first = false;
            continue;
        }
        for (std::size_t k = 0; k < r.size(); ++k) r[k] = std::min(r[k], m[k]);
    }
    return r;
}

bool Polynomial::has_negative_exponents() const {
    for (const auto& [m, c] : terms_)
        for (auto e : m)
            if (e < 0) return true;
    return false;
}

std::optional<Polynomial> Polynomial::divide_exact(const Polynomial& divisor) const {
    if (divisor.is_zero()) throw std::domain_error("Polynomial: division by zero");
    Polynomial r = *this;
    Polynomial q(n_);
    const Monomial& gm = divisor.leading_monomial();
    const GaussianRational& gc = divisor.leading_coefficient();
    while (!r.is_zero()) {
        Monomial m = r.leading_monomial();
        Monomial t;
        for (std::size_t k = 0; k < t.size(); ++k) {
            int d = m[k] - gm[k];
            if (d < 0) return std::nullopt;  // leading term would survive into the remainder
            t[k] = static_cast<std::int8_t>(d);
        }
        GaussianRational c = r.leading_coefficient() / gc;
        for (const auto& [dm, dc] : divisor.terms_) {
            Monomial u;
            for (std::size_t k = 0; k < u.size(); ++k) u[k] = static_cast<std::int8_t>(dm[k] + t[k]);
            r.add_term(u, -(c * dc));
        }
        q.add_term(t, c);
    }
    return q;
}

Polynomial Polynomial::derivative(const Var& v) const {
    int s = slot(v, n_);
    Polynomial r(n_);
    for (const auto& [m, c] : terms_) {
        if (m[s] == 0) continue;
        Monomial t = m;
        t[s] = static_cast<std::int8_t>(t[s] - 1);
        r.add_term(t, c * GaussianRational(m[s]));
    }
    return r;
}

Polynomial Polynomial::permuted(const std::vector<int>& w) const {
    if (static_cast<int>(w.size()) != n_) throw std::invalid_argument("Polynomial::permuted: size mismatch");
    Polynomial r(n_);
    for (const auto& [m, c] : terms_) {
        Monomial t = m;
        for (int i = 0; i < n_; ++i) {
            t[w[i]] = m[i];
            t[n_ + w[i]] = m[n_ + i];
        }
        r.terms_.emplace(t, c);
    }
    return r;
}

Polynomial Polynomial::coefficient(const Var& v, int degree) const {
    int s = slot(v, n_);
    Polynomial r(n_);
    for (const auto& [m, c] : terms_) {
        if (m[s] != degree) continue;
        Monomial t = m;
        t[s] = 0;
        r.terms_.emplace(t, c);
    }
    return r;
}

int Polynomial::degree_in(const Var& v) const {
    int s = slot(v, n_);
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max<int>(d, m[s]);
    return d;
}

bool Polynomial::depends_on(const Var& v) const {
    int s = slot(v, n_);
    return std::any_of(terms_.begin(), terms_.end(), [s](const auto& t) { return t.first[s] != 0; });
}

Polynomial Polynomial::substitute(const Var& v, const GaussianRational& value) const {
    int s = slot(v, n_);
    Polynomial r(n_);
    for (const auto& [m, c] : terms_) {
        Monomial t = m;
        t[s] = 0;
        GaussianRational f = c;
        int e = m[s];
        if (e < 0 && value.is_zero()) throw PoleError("substitution at a pole of " + v.name());
        for (int k = 0; k < std::abs(e); ++k) {
            if (e > 0)
                f *= value;
            else
                f /= value;
        }
        r.add_term(t, f);
    }
    return r;
}

Polynomial Polynomial::promoted(int n) const {
    if (n < n_) throw std::invalid_argument("Polynomial::promoted: cannot shrink");
    if (n == n_) return *this;
    Polynomial r(n);
    for (const auto& [m, c] : terms_) {
        Monomial t{};
        for (int i = 0; i < n_; ++i) {
            t[i] = m[i];
            t[n + i] = m[n_ + i];
        }
        t[2 * n] = m[2 * n_];
        t[2 * n + 1] = m[2 * n_ + 1];
        r.terms_.emplace(t, c);
    }
    return r;
}

namespace {

template <typename Scalar>
Scalar power_of(const Scalar& x, int e, int s, int n) {
    Scalar r(1);
    if (e < 0 && x == Scalar(0)) throw PoleError("negative power of " + slot_name(s, n) + " at zero");
    for (int k = 0; k < std::abs(e); ++k) r *= x;
    if (e < 0) return Scalar(1) / r;
    return r;
}

template <typename Scalar, typename Coef>
Scalar eval_poly(const Polynomial::Terms& terms, const Point<Scalar>& pt, int n, Coef&& coef) {
    if (pt.n != n) throw std::invalid_argument("evaluation point has the wrong site count");
    Scalar acc(0);
    for (const auto& [m, c] : terms) {
        Scalar t = coef(c);
        for (int s = 0; s < 2 * n + 2; ++s) {
            if (m[s] == 0) continue;
            if (!pt.values[s]) throw std::invalid_argument("unbound variable " + slot_name(s, n));
            t *= power_of(*pt.values[s], m[s], s, n);
        }
        acc += t;
    }
    return acc;
}

}  // namespace

GaussianRational Polynomial::evaluate(const ExactPoint& pt) const {
    return eval_poly(terms_, pt, n_, [](const GaussianRational& c) { return c; });
}

std::complex<double> Polynomial::evaluate(const FloatPoint& pt) const {
    return eval_poly(terms_, pt, n_, [](const GaussianRational& c) { return c.to_complex(); });
}

std::string Polynomial::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        bool unit = true;
        for (auto e : m) unit = unit && e == 0;
        os << c.str();
        if (unit) continue;
        for (int s = 0; s < 2 * n_ + 2; ++s) {
            if (m[s] == 0) continue;
            os << "*" << slot_name(s, n_);
            if (m[s] != 1) os << "^" << static_cast<int>(m[s]);
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// RationalFunction

namespace {

// Split a Laurent polynomial into a genuine polynomial and its z-shift.
std::pair<Polynomial, Monomial> to_polynomial(const Polynomial& p) {
    Monomial shift = p.min_exponents();
    for (auto& e : shift) e = std::min<std::int8_t>(e, 0);
    Monomial neg{};
    for (std::size_t k = 0; k < neg.size(); ++k) neg[k] = static_cast<std::int8_t>(-shift[k]);
    return {p.shifted(neg), shift};
}

Polynomial monic(const Polynomial& p, GaussianRational* lead) {
    *lead = p.leading_coefficient();
    Polynomial r = p;
    r *= GaussianRational(1) / *lead;
    return r;
}

}  // namespace

RationalFunction::RationalFunction(int n) : n_(n), num_(n) {}

RationalFunction::RationalFunction(int n, const GaussianRational& c) : n_(n), num_(n, c) {}

RationalFunction::RationalFunction(const Polynomial& num) : n_(num.sites()), num_(num) {}

RationalFunction::RationalFunction(const Polynomial& num, const Polynomial& den)
    : n_(num.sites()), num_(num) {
    if (den.sites() != n_) throw std::invalid_argument("RationalFunction: site count mismatch");
    absorb_denominator(den, {});
    canonicalize();
}

RationalFunction RationalFunction::variable(int n, const Var& v) {
    return RationalFunction(Polynomial::variable(n, v));
}

Polynomial RationalFunction::denominator() const {
    Polynomial d(n_, GaussianRational(1));
    for (const auto& [f, e] : den_) d = d * f.pow(e);
    return d;
}

void RationalFunction::absorb_denominator(const Polynomial& den, const std::vector<Factor>& known) {
    if (den.is_zero()) throw std::domain_error("division by identically-zero function");
    auto add_factor = [this](const Polynomial& f, int e) {
        for (auto& [g, ge] : den_) {
            if (g == f) {
                ge += e;
                return;
            }
        }
        den_.emplace_back(f, e);
    };

    Monomial content = den.min_exponents();
    Monomial neg{};
    for (std::size_t k = 0; k < neg.size(); ++k) neg[k] = static_cast<std::int8_t>(-content[k]);
    Polynomial rest = den.shifted(neg);

    // z-monomial content moves to the numerator as negative exponents.
    Monomial zshift{};
    for (int i = 0; i < n_; ++i) zshift[i] = neg[i];
    num_ = num_.shifted(zshift);
    for (int s = n_; s < 2 * n_ + 2; ++s) {
        if (content[s] == 0) continue;
        Monomial m{};
        m[s] = 1;
        Polynomial v(n_);
        v.add_term(m, GaussianRational(1));
        add_factor(v, content[s]);
    }

    auto trial = [&](const Polynomial& f) {
        while (!rest.is_constant()) {
            auto q = rest.divide_exact(f);
            if (!q) break;
            rest = std::move(*q);
            add_factor(f, 1);
        }
    };
    for (const auto& [f, e] : known) trial(f);
    std::vector<Factor> own = den_;
    for (const auto& [f, e] : own) trial(f);
    // Coordinate differences are the only irreducible factors the operator
    // algebra produces; splitting them off keeps canonical forms unique there.
    for (int i = 0; i < n_ && !rest.is_constant(); ++i)
        for (int j = i + 1; j < n_; ++j)
            trial(Polynomial::variable(n_, Var::z(i)) - Polynomial::variable(n_, Var::z(j)));

    GaussianRational lead;
    if (rest.is_constant()) {
        num_ *= GaussianRational(1) / rest.leading_coefficient();
        return;
    }
    Polynomial f = monic(rest, &lead);
    num_ *= GaussianRational(1) / lead;
    add_factor(f, 1);
}

void RationalFunction::canonicalize() {
    if (num_.is_zero()) {
        den_.clear();
        return;
    }
    for (auto& [f, e] : den_) {
        while (e > 0) {
            auto [poly, shift] = to_polynomial(num_);
            auto q = poly.divide_exact(f);
            if (!q) break;
            num_ = q->shifted(shift);
            --e;
        }
    }
    std::erase_if(den_, [](const Factor& f) { return f.second == 0; });
    std::sort(den_.begin(), den_.end(), [](const Factor& a, const Factor& b) { return a.first < b.first; });
}

std::pair<int, int> RationalFunction::unify_sites(RationalFunction& a, RationalFunction& b) {
    int n = std::max(a.n_, b.n_);
    if (a.n_ != n) a = a.promoted(n);
    if (b.n_ != n) b = b.promoted(n);
    return {n, n};
}

RationalFunction RationalFunction::promoted(int n) const {
    if (n == n_) return *this;
    RationalFunction r(n);
    r.num_ = num_.promoted(n);
    for (const auto& [f, e] : den_) r.den_.emplace_back(f.promoted(n), e);
    std::sort(r.den_.begin(), r.den_.end(), [](const Factor& a, const Factor& b) { return a.first < b.first; });
    return r;
}

RationalFunction& RationalFunction::operator+=(const RationalFunction& o) {
    RationalFunction b = o;
    unify_sites(*this, b);
    if (b.is_zero()) return *this;
    if (is_zero()) return *this = b;
    if (den_ == b.den_) {
        num_ += b.num_;
        canonicalize();
        return *this;
    }
    std::vector<Factor> lcm = den_;
    for (const auto& [f, e] : b.den_) {
        auto it = std::find_if(lcm.begin(), lcm.end(), [&](const Factor& g) { return g.first == f; });
        if (it == lcm.end())
            lcm.emplace_back(f, e);
        else
            it->second = std::max(it->second, e);
    }
    auto cofactor = [&](const std::vector<Factor>& own) {
        Polynomial m(n_, GaussianRational(1));
        for (const auto& [f, e] : lcm) {
            int have = 0;
            for (const auto& [g, ge] : own)
                if (g == f) have = ge;
            if (e > have) m = m * f.pow(e - have);
        }
        return m;
    };
    num_ = num_ * cofactor(den_) + b.num_ * cofactor(b.den_);
    den_ = std::move(lcm);
    canonicalize();
    return *this;
}

RationalFunction& RationalFunction::operator-=(const RationalFunction& o) { return *this += -o; }

RationalFunction& RationalFunction::operator*=(const RationalFunction& o) {
    RationalFunction b = o;
    unify_sites(*this, b);
    if (is_zero() || b.is_zero()) {
        *this = RationalFunction(n_);
        return *this;
    }
    num_ = num_ * b.num_;
    for (const auto& [f, e] : b.den_) {
        auto it = std::find_if(den_.begin(), den_.end(), [&](const Factor& g) { return g.first == f; });
        if (it == den_.end())
            den_.emplace_back(f, e);
        else
            it->second += e;
    }
    canonicalize();
    return *this;
}

RationalFunction& RationalFunction::operator/=(const RationalFunction& o) {
    RationalFunction b = o;
    unify_sites(*this, b);
    if (b.is_zero()) throw std::domain_error("division by identically-zero function");
    num_ = num_ * b.denominator();
    std::vector<Factor> known = b.den_;
    known.insert(known.end(), den_.begin(), den_.end());
    absorb_denominator(b.num_, known);
    canonicalize();
    return *this;
}

RationalFunction RationalFunction::operator-() const {
    RationalFunction r = *this;
    r.num_ = -r.num_;
    return r;
}

RationalFunction RationalFunction::pow(int e) const {
    if (e < 0) return RationalFunction(n_, GaussianRational(1)) / pow(-e);
    RationalFunction r(n_, GaussianRational(1));
    for (int k = 0; k < e; ++k) r *= *this;
    return r;
}

bool operator==(const RationalFunction& a, const RationalFunction& b) {
    if (a.n_ != b.n_) {
        RationalFunction x = a, y = b;
        RationalFunction::unify_sites(x, y);
        return x == y;
    }
    return a.num_ == b.num_ && a.den_ == b.den_;
}

RationalFunction RationalFunction::derive(const Var& v, bool euler) const {
    slot(v, n_);  // validates the variable
    if (euler && v.kind != Var::Kind::Z) throw std::invalid_argument("Euler derivative needs a z variable");
    std::vector<std::size_t> dep;
    for (std::size_t k = 0; k < den_.size(); ++k)
        if (den_[k].first.depends_on(v)) dep.push_back(k);

    Polynomial total = num_.derivative(v);
    for (std::size_t k : dep) total = total * den_[k].first;
    for (std::size_t k : dep) {
        Polynomial term = num_ * den_[k].first.derivative(v);
        term *= GaussianRational(-den_[k].second);
        for (std::size_t j : dep)
            if (j != k) term = term * den_[j].first;
        total += term;
    }
    RationalFunction r(n_);
    r.num_ = std::move(total);
    r.den_ = den_;
    for (std::size_t k : dep) r.den_[k].second += 1;
    if (euler) {
        Monomial m{};
        m[slot(v, n_)] = 1;
        r.num_ = r.num_.shifted(m);
    }
    r.canonicalize();
    return r;
}

RationalFunction RationalFunction::permuted(const std::vector<int>& w) const {
    RationalFunction r(n_);
    r.num_ = num_.permuted(w);
    for (const auto& [f, e] : den_) {
        GaussianRational lead;
        Polynomial g = monic(f.permuted(w), &lead);
        r.num_ *= (GaussianRational(1) / lead);
        if (e > 1) {
            GaussianRational inv = GaussianRational(1) / lead;
            for (int k = 1; k < e; ++k) r.num_ *= inv;
        }
        r.den_.emplace_back(std::move(g), e);
    }
    std::sort(r.den_.begin(), r.den_.end(), [](const Factor& a, const Factor& b) { return a.first < b.first; });
    return r;
}

RationalFunction RationalFunction::coefficient(const Var& v, int degree) const {
    for (const auto& [f, e] : den_)
        if (f.depends_on(v)) throw std::invalid_argument("coefficient: denominator depends on " + v.name());
    RationalFunction r(n_);
    r.num_ = num_.coefficient(v, degree);
    r.den_ = den_;
    r.canonicalize();
    return r;
}

RationalFunction RationalFunction::substitute(const Var& v, const GaussianRational& value) const {
    RationalFunction r(num_.substitute(v, value));
    for (const auto& [f, e] : den_) {
        Polynomial g = f.substitute(v, value);
        if (g.is_zero()) throw PoleError("substitution hits a pole");
        r /= RationalFunction(g).pow(e);
    }
    return r;
}

bool RationalFunction::depends_on(const Var& v) const {
    if (num_.depends_on(v)) return true;
    return std::any_of(den_.begin(), den_.end(), [&](const Factor& f) { return f.first.depends_on(v); });
}

GaussianRational RationalFunction::evaluate(const ExactPoint& pt) const {
    GaussianRational d(1);
    for (const auto& [f, e] : den_) {
        GaussianRational fv = f.evaluate(pt);
        if (fv.is_zero()) throw PoleError("pole at evaluation point: factor " + f.str() + " vanishes");
        for (int k = 0; k < e; ++k) d *= fv;
    }
    return num_.evaluate(pt) / d;
}

std::complex<double> RationalFunction::evaluate(const FloatPoint& pt) const {
    std::complex<double> d(1.0);
    for (const auto& [f, e] : den_) {
        std::complex<double> fv = f.evaluate(pt);
        if (fv == 0.0) throw PoleError("pole at evaluation point: factor " + f.str() + " vanishes");
        for (int k = 0; k < e; ++k) d *= fv;
    }
    return num_.evaluate(pt) / d;
}

std::string RationalFunction::str() const {
    if (den_.empty()) return num_.str();
    std::string s = "(" + num_.str() + ")/(";
    bool first = true;
    for (const auto& [f, e] : den_) {
        if (!first) s += "*";
        first = false;
        s += "(" + f.str() + ")";
        if (e != 1) s += "^" + std::to_string(e);
    }
    return s + ")";
}

bool rf_equal(const RationalFunction& a, const RationalFunction& b) { return (a - b).is_zero(); }

RationalFunction rf_arith(const RationalFunction& a, const RationalFunction& b, ArithOp op) {
    switch (op) {
        case ArithOp::Add: return a + b;
        case ArithOp::Sub: return a - b;
        case ArithOp::Mul: return a * b;
        case ArithOp::Div: return a / b;
    }
    throw std::logic_error("bad ArithOp");
}

// ---------------------------------------------------------------------------
// CompiledRational

CompiledRational::Poly CompiledRational::compile(const Polynomial& p) {
    Poly out;
    for (const auto& [m, c] : p.terms()) {
        Term t{c.to_complex(), {}};
        for (std::size_t s = 0; s < m.size(); ++s)
            if (m[s] != 0) t.powers.emplace_back(static_cast<int>(s), m[s]);
        out.push_back(std::move(t));
    }
    return out;
}

CompiledRational::CompiledRational(const RationalFunction& f) : num_(compile(f.numerator())) {
    for (const auto& [g, e] : f.denominator_factors()) den_.emplace_back(compile(g), e);
}

std::complex<double> CompiledRational::eval(const Poly& p, const std::vector<std::complex<double>>& s) {
    std::complex<double> acc = 0.0;
    for (const auto& t : p) {
        std::complex<double> v = t.coef;
        for (auto [k, e] : t.powers) {
            std::complex<double> x = s[k];
            std::complex<double> xp = 1.0;
            for (int j = 0; j < std::abs(e); ++j) xp *= x;
            v = e > 0 ? v * xp : v / xp;
        }
        acc += v;
    }
    return acc;
}

std::complex<double> CompiledRational::operator()(const std::vector<std::complex<double>>& s) const {
    std::complex<double> d = 1.0;
    for (const auto& [g, e] : den_) {
        std::complex<double> v = eval(g, s);
        if (v == 0.0) throw PoleError("pole in compiled rational function");
        for (int k = 0; k < e; ++k) d *= v;
    }
    return eval(num_, s) / d;
}

}  // namespace cmslab
