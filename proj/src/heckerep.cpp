#include "cmslab/heckerep.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

namespace cmslab {

std::vector<int> reduced_word(const SiteMap& w) {
    // Bubble sort records the adjacent swaps that undo w; reversing gives a word for w.
    SiteMap a = w;
    std::vector<int> undo;
    for (std::size_t pass = 0; pass < a.size(); ++pass)
        for (std::size_t i = 0; i + 1 < a.size(); ++i)
            if (a[i] > a[i + 1]) {
                std::swap(a[i], a[i + 1]);
                undo.push_back(static_cast<int>(i));
            }
    std::reverse(undo.begin(), undo.end());
    return undo;
}

SiteMap from_word(int n, const std::vector<int>& word) {
    SiteMap w = identity_map(n);
    for (int a : word) w = compose(w, transposition_map(n, a, a + 1));
    return w;
}

namespace {

RationalFunction rf_const(int n, long c) { return RationalFunction(n, GaussianRational(c)); }
RationalFunction rf_z(int n, int i) { return RationalFunction::variable(n, Var::z(i)); }
RationalFunction rf_lambda(int n) { return RationalFunction::variable(n, Var::lambda()); }

long binomial(int a, int k) {
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (a - k + i) / i;
    return r;
}

void check_site(int i, int n) {
    if (i < 1 || i > n) throw std::out_of_range("site " + std::to_string(i) + " out of range for n=" + std::to_string(n));
}

std::string alpha_str(const Alpha& a) {
    std::string s;
    for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + std::to_string(a[i]);
    return "(" + s + ")";
}

std::string word_str(const SiteMap& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i] + 1);
    return "[" + s + "]";
}

}  // namespace

NormalOrderedOperator::NormalOrderedOperator(OpKind kind, int n) : kind_(kind), n_(n) {
    if (n < 1 || n > kMaxExactSites) throw std::invalid_argument("operator algebra needs 1 <= n <= 7");
}

NormalOrderedOperator NormalOrderedOperator::scalar(OpKind kind, int n, const RationalFunction& f) {
    NormalOrderedOperator r(kind, n);
    r.add_term({Alpha(n, 0), identity_map(n)}, f);
    return r;
}

NormalOrderedOperator NormalOrderedOperator::permutation(OpKind kind, int n, const SiteMap& w) {
    NormalOrderedOperator r(kind, n);
    r.add_term({Alpha(n, 0), w}, rf_const(n, 1));
    return r;
}

NormalOrderedOperator NormalOrderedOperator::transposition(OpKind kind, int n, int i, int j) {
    check_site(i, n);
    check_site(j, n);
    return permutation(kind, n, transposition_map(n, i - 1, j - 1));
}

NormalOrderedOperator NormalOrderedOperator::momentum(OpKind kind, int n, int i) {
    check_site(i, n);
    NormalOrderedOperator r(kind, n);
    if (kind == OpKind::Quantum) {
        Alpha a(n, 0);
        a[i - 1] = 1;
        r.add_term({a, identity_map(n)}, rf_const(n, 1));
    } else {
        r.add_term({Alpha(n, 0), identity_map(n)}, RationalFunction::variable(n, Var::p(i - 1)));
    }
    return r;
}

NormalOrderedOperator NormalOrderedOperator::coordinate(OpKind kind, int n, int i) {
    check_site(i, n);
    return scalar(kind, n, rf_z(n, i - 1));
}

RationalFunction NormalOrderedOperator::coefficient(const Alpha& alpha, const SiteMap& w) const {
    auto it = terms_.find({alpha, w});
    return it == terms_.end() ? RationalFunction(n_) : it->second;
}

void NormalOrderedOperator::add_term(const TermKey& key, const RationalFunction& f) {
    if (f.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(key, f);
    if (!inserted) {
        it->second += f;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

void NormalOrderedOperator::check(const NormalOrderedOperator& o) const {
    if (o.kind_ != kind_) throw std::invalid_argument("operator kind mismatch");
    if (o.n_ != n_) throw std::invalid_argument("operator site count mismatch");
}

NormalOrderedOperator& NormalOrderedOperator::operator+=(const NormalOrderedOperator& o) {
    check(o);
    for (const auto& [k, f] : o.terms_) add_term(k, f);
    return *this;
}

NormalOrderedOperator& NormalOrderedOperator::operator-=(const NormalOrderedOperator& o) {
    check(o);
    for (const auto& [k, f] : o.terms_) add_term(k, -f);
    return *this;
}

NormalOrderedOperator& NormalOrderedOperator::operator*=(const RationalFunction& f) {
    if (f.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
        it->second = f * it->second;
        it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
    }
    return *this;
}

NormalOrderedOperator operator*(const NormalOrderedOperator& a, const NormalOrderedOperator& b) {
    a.check(b);
    const int n = a.n_;
    NormalOrderedOperator r(a.kind_, n);
    const RationalFunction hbar = RationalFunction::variable(n, Var::hbar());
    for (const auto& [ka, f] : a.terms_) {
        for (const auto& [kb, g] : b.terms_) {
            // K_w g = g(z_w) K_w and K_w p^beta = p^{w.beta} K_w
            RationalFunction gw = g.permuted(ka.w);
            SiteMap w = compose(ka.w, kb.w);
            Alpha beta(n, 0);
            for (int i = 0; i < n; ++i) beta[ka.w[i]] = kb.alpha[i];
            if (a.kind_ == OpKind::Semiclassical) {
                r.add_term({beta, w}, f * gw);
                continue;
            }
            // p^alpha h = sum_kappa binom(alpha, kappa) hbar^|kappa| theta^kappa(h) p^(alpha - kappa)
            Alpha out(n);
            std::function<void(int, const RationalFunction&, long, int)> rec = [&](int i, const RationalFunction& h,
                                                                                   long c, int order) {
                if (h.is_zero()) return;
                if (i == n) {
                    RationalFunction coef = f * h * RationalFunction(n, GaussianRational(c));
                    if (order) coef *= hbar.pow(order);
                    Alpha total(n);
                    for (int s = 0; s < n; ++s) total[s] = out[s] + beta[s];
                    r.add_term({total, w}, coef);
                    return;
                }
                RationalFunction d = h;
                for (int k = 0; k <= ka.alpha[i]; ++k) {
                    out[i] = ka.alpha[i] - k;
                    rec(i + 1, d, c * binomial(ka.alpha[i], k), order + k);
                    if (k < ka.alpha[i]) d = d.derive(Var::z(i), true);
                    if (d.is_zero()) break;
                }
            };
            rec(0, gw, 1, 0);
        }
    }
    return r;
}

std::string NormalOrderedOperator::str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, f] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "[" << f.str() << "]";
        if (kind_ == OpKind::Quantum) os << "p^" << alpha_str(k.alpha);
        os << "K" << word_str(k.w);
    }
    return first ? "0" : os.str();
}

NormalOrderedOperator op_multiply(const NormalOrderedOperator& a, const NormalOrderedOperator& b) { return a * b; }

NormalOrderedOperator op_commutator(const NormalOrderedOperator& a, const NormalOrderedOperator& b) {
    return a * b - b * a;
}

NormalOrderedOperator op_power(const NormalOrderedOperator& a, int k) {
    if (k < 0) throw std::invalid_argument("op_power: negative exponent");
    NormalOrderedOperator r = NormalOrderedOperator::scalar(a.kind(), a.sites(), rf_const(a.sites(), 1));
    for (int i = 0; i < k; ++i) r = r * a;
    return r;
}

namespace {

// p_j + sum_{i>j} z_i/(z_i - z_j) K_ij - sum_{i<j} z_j/(z_j - z_i) K_ij
NormalOrderedOperator dunkl_impl(OpKind kind, int j, int n, bool literal) {
    check_site(j, n);
    NormalOrderedOperator d = NormalOrderedOperator::momentum(kind, n, j);
    const int jj = j - 1;
    for (int i = 0; i < n; ++i) {
        if (i == jj) continue;
        RationalFunction c(n);
        bool upper = literal ? jj > i : i > jj;
        if (upper) {
            int hi = std::max(i, jj), lo = std::min(i, jj);
            c = rf_z(n, hi) / (rf_z(n, hi) - rf_z(n, lo));
        } else {
            int hi = std::max(i, jj), lo = std::min(i, jj);
            c = -(rf_z(n, hi) / (rf_z(n, hi) - rf_z(n, lo)));
        }
        d.add_term({Alpha(n, 0), transposition_map(n, i, jj)}, c);
    }
    return d;
}

}  // namespace

NormalOrderedOperator dunkl_quantum(int j, int n) { return dunkl_impl(OpKind::Quantum, j, n, false); }
NormalOrderedOperator dunkl_classical(int j, int n) { return dunkl_impl(OpKind::Semiclassical, j, n, false); }
NormalOrderedOperator dunkl_classical_literal(int j, int n) { return dunkl_impl(OpKind::Semiclassical, j, n, true); }

NormalOrderedOperator dunkl(OpKind kind, int j, int n) {
    return kind == OpKind::Quantum ? dunkl_quantum(j, n) : dunkl_classical(j, n);
}

NormalOrderedOperator symmetric_hamiltonian(int k, int n, OpKind kind) {
    if (k < 1 || n < 1) throw std::invalid_argument("symmetric_hamiltonian needs k >= 1 and n >= 1");
    if (n > 4 || k > 4)
        throw CostGuardError("exact normal ordering is limited to n <= 4 and k <= 4 (got n=" + std::to_string(n) +
                             ", k=" + std::to_string(k) + ")");
    NormalOrderedOperator h(kind, n);
    for (int i = 1; i <= n; ++i) h += op_power(dunkl(kind, i, n), k);
    h *= RationalFunction(n, GaussianRational(mpq_class(1, k)));
    return h;
}

RationalFunction RestrictedOperator::coefficient(const Alpha& alpha, const SiteMap& sigma) const {
    auto it = terms.find({alpha, sigma});
    return it == terms.end() ? RationalFunction(n) : it->second;
}

bool RestrictedOperator::operator==(const RestrictedOperator& o) const {
    if (n != o.n || terms.size() != o.terms.size()) return false;
    for (const auto& [k, f] : terms) {
        auto it = o.terms.find(k);
        if (it == o.terms.end() || !rf_equal(f, it->second)) return false;
    }
    return true;
}

int permutation_sign(const SiteMap& w) { return reduced_word(w).size() % 2 ? -1 : 1; }

RestrictedOperator restrict_to_symmetric(const NormalOrderedOperator& a, Exchange e) {
    if (a.kind() != OpKind::Quantum) throw std::invalid_argument("restriction applies to quantum operators");
    RestrictedOperator r;
    r.n = a.sites();
    for (const auto& [k, f] : a.terms()) {
        bool flip = e == Exchange::Antisymmetric && permutation_sign(k.w) < 0;
        r.terms.emplace(TermKey{k.alpha, inverse(k.w)}, flip ? -f : f);
    }
    return r;
}

SemiclassicalSplit semiclassical_split(const RestrictedOperator& a) {
    const int n = a.n;
    std::map<SiteMap, RationalFunction> h0, h1;
    for (const auto& [k, f] : a.terms) {
        RationalFunction g = f;
        for (int i = 0; i < n; ++i)
            if (k.alpha[i]) g *= RationalFunction::variable(n, Var::p(i)).pow(k.alpha[i]);
        RationalFunction c0 = g.coefficient(Var::hbar(), 0), c1 = g.coefficient(Var::hbar(), 1);
        if (!c0.is_zero()) h0.try_emplace(k.w, RationalFunction(n)).first->second += c0;
        if (!c1.is_zero()) h1.try_emplace(k.w, RationalFunction(n)).first->second += c1;
    }
    SemiclassicalSplit s{RationalFunction(n), {}};
    for (const auto& [w, f] : h0) {
        if (f.is_zero()) continue;
        if (w != identity_map(n))
            throw UnityViolation("hbar^0 part carries permutation " + word_str(w) + ": " + f.str());
        s.h0 = f;
    }
    for (auto& [w, f] : h1)
        if (!f.is_zero()) s.h1.emplace(w, f);
    return s;
}

SemiclassicalSplit weyl_symbol(const SemiclassicalSplit& s) {
    const int n = s.h0.sites();
    RationalFunction corr(n);
    for (int i = 0; i < n; ++i) corr += s.h0.derive(Var::z(i), true).derive(Var::p(i));
    corr *= RationalFunction(n, GaussianRational(mpq_class(-1, 2)));
    SemiclassicalSplit out = s;
    SiteMap id = identity_map(n);
    auto it = out.h1.find(id);
    RationalFunction total = it == out.h1.end() ? corr : it->second + corr;
    if (total.is_zero())
        out.h1.erase(id);
    else
        out.h1[id] = total;
    return out;
}

RationalFunction lax_power_trace(int k, int n) {
    using M = std::vector<std::vector<RationalFunction>>;
    M L(n, std::vector<RationalFunction>(n, RationalFunction(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            L[i][j] = i == j ? RationalFunction::variable(n, Var::p(i)) : rf_z(n, i) / (rf_z(n, i) - rf_z(n, j));
    M P = L;
    for (int e = 1; e < k; ++e) {
        M Q(n, std::vector<RationalFunction>(n, RationalFunction(n)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int m = 0; m < n; ++m) Q[i][j] += P[i][m] * L[m][j];
        P = std::move(Q);
    }
    RationalFunction tr(n);
    for (int i = 0; i < n; ++i) tr += P[i][i];
    return tr * RationalFunction(n, GaussianRational(mpq_class(1, k)));
}

GaussianRational lax_determinant(const std::vector<GaussianRational>& p, const std::vector<GaussianRational>& z,
                                 const GaussianRational& lambda) {
    const std::size_t n = p.size();
    std::vector<std::vector<GaussianRational>> A(n, std::vector<GaussianRational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) A[i][j] = i == j ? lambda + p[i] : z[i] / (z[i] - z[j]);
    GaussianRational det(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && A[piv][c].is_zero()) ++piv;
        if (piv == n) return GaussianRational(0);
        if (piv != c) {
            std::swap(A[piv], A[c]);
            det = -det;
        }
        det *= A[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            if (A[r][c].is_zero()) continue;
            GaussianRational m = A[r][c] / A[c][c];
            for (std::size_t k = c; k < n; ++k) A[r][k] -= m * A[c][k];
        }
    }
    return det;
}

NormalOrderedOperator generating_operator(int n) {
    if (n > 4) throw CostGuardError("generating operator is limited to n <= 4");
    auto lam = NormalOrderedOperator::scalar(OpKind::Semiclassical, n, rf_lambda(n));
    NormalOrderedOperator t = NormalOrderedOperator::scalar(OpKind::Semiclassical, n, rf_const(n, 1));
    for (int j = 1; j <= n; ++j) t = t * (lam + dunkl_classical(j, n));
    return t;
}

nlohmann::json first_nonzero(const NormalOrderedOperator& a) {
    if (a.is_zero()) return nullptr;
    const auto& [k, f] = *a.terms().begin();
    return {{"alpha", k.alpha}, {"word", word_str(k.w)}, {"coefficient", f.str()}};
}

namespace {

Report zero_report(const std::string& identity, const std::string& anchor, nlohmann::json params,
                   const NormalOrderedOperator& difference) {
    Report r{identity, anchor, std::move(params), difference.is_zero(), first_nonzero(difference)};
    return r;
}

const char* kind_name(OpKind k) { return k == OpKind::Quantum ? "quantum" : "semiclassical"; }

}  // namespace

std::vector<Report> hecke_suite(int n, OpKind kind) {
    if (n < 2 || n > 4) throw CostGuardError("Hecke suite runs for 2 <= n <= 4");
    const std::string d = kind == OpKind::Quantum ? "d" : "D";
    const char* hecke = "degenerate affine Hecke algebra relations";
    std::vector<NormalOrderedOperator> D;
    for (int j = 1; j <= n; ++j) D.push_back(dunkl(kind, j, n));
    auto K = [&](int i, int j) { return NormalOrderedOperator::transposition(kind, n, i, j); };
    auto Z = [&](int i) { return NormalOrderedOperator::coordinate(kind, n, i); };
    auto one = NormalOrderedOperator::scalar(kind, n, rf_const(n, 1));
    nlohmann::json params = {{"n", n}, {"kind", kind_name(kind)}};
    std::vector<Report> out;

    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            out.push_back(zero_report("[" + d + std::to_string(i) + "," + d + std::to_string(j) + "] = 0", hecke,
                                      params, op_commutator(D[i - 1], D[j - 1])));
    for (int i = 1; i < n; ++i) {
        auto diff = K(i, i + 1) * D[i - 1] - D[i] * K(i, i + 1) - one;
        out.push_back(zero_report("K" + std::to_string(i) + std::to_string(i + 1) + " " + d + std::to_string(i) + " = " +
                                      d + std::to_string(i + 1) + " K" + std::to_string(i) + std::to_string(i + 1) +
                                      " + 1",
                                  hecke, params, diff));
    }
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j < n; ++j) {
            if (i == j || i == j + 1) continue;
            out.push_back(zero_report("[" + d + std::to_string(i) + ",K" + std::to_string(j) + std::to_string(j + 1) +
                                          "] = 0",
                                      hecke, params, op_commutator(D[i - 1], K(j, j + 1))));
        }
    const char* coords = "commutation of Dunkl operators with coordinates";
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            auto lhs = op_commutator(D[i - 1], Z(j));
            NormalOrderedOperator rhs(kind, n);
            std::string id = "[" + d + std::to_string(i) + ",z" + std::to_string(j) + "] = ";
            if (i != j) {
                rhs = Z(std::max(i, j)) * K(i, j);
                rhs *= rf_const(n, -1);
                id += "-z" + std::to_string(std::max(i, j)) + " K" + std::to_string(i) + std::to_string(j);
            } else {
                for (int m = 1; m <= n; ++m)
                    if (m != i) rhs += Z(std::max(i, m)) * K(i, m);
                id += "sum_m z_max(i,m) K_im";
                if (kind == OpKind::Quantum) {
                    rhs += NormalOrderedOperator::scalar(kind, n, RationalFunction::variable(n, Var::hbar()) * rf_z(n, i - 1));
                    id += " + hbar z" + std::to_string(i);
                }
            }
            out.push_back(zero_report(id, coords, params, lhs - rhs));
        }
    return out;
}

std::vector<Report> kcancel_suite(int n) {
    if (n < 2 || n > 4) throw CostGuardError("cancellation identity suite runs for 2 <= n <= 4");
    const OpKind kind = OpKind::Semiclassical;
    auto lam = NormalOrderedOperator::scalar(kind, n, rf_lambda(n));
    auto K = [&](int i, int j) { return NormalOrderedOperator::transposition(kind, n, i, j); };
    auto Z = [&](int i) { return NormalOrderedOperator::coordinate(kind, n, i); };
    std::vector<Report> out;
    for (int l = 2; l <= n; ++l) {
        auto Dl1 = lam + dunkl_classical(l - 1, n), Dl = lam + dunkl_classical(l, n);
        NormalOrderedOperator sum_l(kind, n), sum_l1(kind, n);
        for (int j = 1; j < l; ++j) sum_l += Z(l) * K(j, l);
        for (int j = 1; j < l - 1; ++j) sum_l1 += Z(l - 1) * K(j, l - 1);
        auto lhs = K(l - 1, l) * (Dl1 * sum_l - Z(l) * K(l - 1, l) * Dl) * K(l - 1, l);
        auto rhs = sum_l1 * Dl;
        out.push_back(zero_report("cancellation identity l=" + std::to_string(l),
                                  "auxiliary cancellation identity for the generating function",
                                  {{"n", n}, {"l", l}}, lhs - rhs));
    }
    return out;
}

std::vector<Report> classical_generating_check(int n, int samples, unsigned long seed) {
    NormalOrderedOperator t = generating_operator(n);
    std::vector<Report> out;
    const char* anchor = "generating function of semiclassical Dunkl operators commutes with coordinates";
    NormalOrderedOperator off(OpKind::Semiclassical, n);
    for (const auto& [k, f] : t.terms())
        if (k.w != identity_map(n)) off.add_term(k, f);
    out.push_back(zero_report("f_w(prod(lambda + D_j)) = 0 for w != id", anchor, {{"n", n}}, off));
    for (int k = 1; k <= n; ++k)
        out.push_back(zero_report("[t(lambda), z" + std::to_string(k) + "] = 0", anchor, {{"n", n}, {"k", k}},
                                  op_commutator(t, NormalOrderedOperator::coordinate(OpKind::Semiclassical, n, k))));

    RationalFunction fid = t.coefficient(identity_map(n));
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
    auto rnd = [&] { return GaussianRational(mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng))); };
    for (int s = 0; s < samples; ++s) {
        std::vector<GaussianRational> p(n), z(n);
        ExactPoint pt(n);
        for (int i = 0; i < n; ++i) {
            p[i] = rnd();
            pt.set(Var::p(i), p[i]);
        }
        for (;;) {
            for (int i = 0; i < n; ++i) z[i] = rnd();
            bool ok = true;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < i; ++j) ok = ok && z[i] != z[j] && !z[i].is_zero();
            if (ok) break;
        }
        for (int i = 0; i < n; ++i) pt.set(Var::z(i), z[i]);
        GaussianRational lam = rnd();
        pt.set(Var::lambda(), lam);
        GaussianRational lhs = fid.evaluate(pt), rhs = lax_determinant(p, z, lam);
        Report r{"f_id(lambda; p, z) = det(lambda + L) sample " + std::to_string(s),
                 "generating function of the Hamiltonians",
                 {{"n", n}, {"sample", s}},
                 lhs == rhs,
                 nullptr};
        if (!r.pass) r.witness = {{"f_id", lhs.str()}, {"det", rhs.str()}};
        out.push_back(r);
    }
    return out;
}

CompiledSpinField::CompiledSpinField(int n, const std::map<SiteMap, RationalFunction>& table) : n_(n) {
    for (const auto& [w, f] : table) terms_.emplace_back(w, CompiledRational(f));
}

SpinOperator CompiledSpinField::operator()(const std::vector<double>& p, const std::vector<cplx>& z, int N) const {
    std::vector<cplx> slots(2 * n_ + 2, 0.0);
    for (int i = 0; i < n_; ++i) {
        slots[i] = z[i];
        slots[n_ + i] = p[i];
    }
    std::vector<WeightedWord> ws;
    for (const auto& [w, f] : terms_) ws.push_back({f(slots), w});
    return SpinOperator::words(n_, N, std::move(ws));
}

}  // namespace cmslab
