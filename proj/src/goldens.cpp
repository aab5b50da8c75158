#include "cmslab/goldens.hpp"

namespace cmslab::goldens {

namespace {

RationalFunction z(int n, int i) { return RationalFunction::variable(n, Var::z(i)); }
RationalFunction num(int n, long a, long b = 1) { return RationalFunction(n, GaussianRational(mpq_class(a, b))); }
RationalFunction pair_w(int n, int i, int j) { return z(n, i) * z(n, j) / (z(n, i) - z(n, j)).pow(2); }
RationalFunction triple_c(int n, int i, int j, int k) {
    return z(n, i) * z(n, j) * z(n, k) / ((z(n, i) - z(n, j)) * (z(n, j) - z(n, k)) * (z(n, k) - z(n, i)));
}

void add(RestrictedOperator& r, const Alpha& a, const SiteMap& s, const RationalFunction& f) {
    auto [it, inserted] = r.terms.try_emplace(TermKey{a, s}, f);
    if (!inserted) it->second += f;
    if (it->second.is_zero()) r.terms.erase(it);
}

void add(std::map<SiteMap, RationalFunction>& t, const SiteMap& s, const RationalFunction& f) {
    auto [it, inserted] = t.try_emplace(s, f);
    if (!inserted) it->second += f;
    if (it->second.is_zero()) t.erase(it);
}

Alpha unit(int n, int i, int power) {
    Alpha a(n, 0);
    a[i] = power;
    return a;
}

}  // namespace

RestrictedOperator displayed_H2(int n) {
    RestrictedOperator r;
    r.n = n;
    const RationalFunction hbar = RationalFunction::variable(n, Var::hbar());
    const SiteMap id = identity_map(n);
    for (int i = 0; i < n; ++i) add(r, unit(n, i, 2), id, num(n, 1, 2));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            RationalFunction c = num(n, -1, 2) * pair_w(n, i, j);
            add(r, Alpha(n, 0), id, c);
            add(r, Alpha(n, 0), transposition_map(n, i, j), c * hbar);
        }
    return r;
}

RestrictedOperator displayed_H3(int n) {
    RestrictedOperator r;
    r.n = n;
    const RationalFunction hbar = RationalFunction::variable(n, Var::hbar());
    const SiteMap id = identity_map(n);
    for (int i = 0; i < n; ++i) add(r, unit(n, i, 3), id, num(n, 1, 3));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            RationalFunction c = -pair_w(n, i, j);
            add(r, unit(n, i, 1), id, c);
            add(r, unit(n, i, 1), transposition_map(n, i, j), c * hbar);
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                if (i == j || j == k || k == i) continue;
                SiteMap s = compose(transposition_map(n, j, k), transposition_map(n, i, j));
                add(r, Alpha(n, 0), s, num(n, -1, 3) * hbar * triple_c(n, i, j, k));
            }
    return r;
}

std::map<SiteMap, RationalFunction> displayed_H1_2(int n) {
    std::map<SiteMap, RationalFunction> t;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) add(t, transposition_map(n, i, j), num(n, -1, 2) * pair_w(n, i, j));
    return t;
}

std::map<SiteMap, RationalFunction> displayed_H1_3(int n) {
    std::map<SiteMap, RationalFunction> t;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) add(t, transposition_map(n, i, j), -pair_w(n, i, j) * RationalFunction::variable(n, Var::p(i)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                if (i == j || j == k || k == i) continue;
                add(t, compose(transposition_map(n, j, k), transposition_map(n, i, j)), num(n, -1, 3) * triple_c(n, i, j, k));
            }
    return t;
}

}  // namespace cmslab::goldens
