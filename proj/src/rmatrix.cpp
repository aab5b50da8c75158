#include "cmslab/rmatrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cmslab {

namespace {

const cplx I(0, 1);

void check_pole(double x, const char* what) {
    if (std::abs(x) < 1e-14) throw std::invalid_argument(std::string("R-matrix evaluated at a pole: ") + what);
}

}  // namespace

CMatrix RMatrixFamily::operator()(double u, double hbar) const {
    check_pole(u, "u = 0");
    return R(u, hbar);
}

CMatrix flip(int N) {
    CMatrix P = CMatrix::Zero(N * N, N * N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) P(b + N * a, a + N * b) = 1.0;
    return P;
}

RMatrixFamily yang_r(int N) {
    if (N < 2) throw std::invalid_argument("yang_r: N must be >= 2");
    CMatrix P = flip(N);
    RMatrixFamily fam;
    fam.N = N;
    fam.R = [P](double u, double hbar) -> CMatrix {
        return CMatrix::Identity(P.rows(), P.cols()) + (hbar / u) * P;
    };
    fam.r = [P](double u) -> CMatrix { return (-I / u) * P; };
    fam.s = [P](double) -> CMatrix { return CMatrix::Zero(P.rows(), P.cols()); };
    return fam;
}

CMatrix embed(const CMatrix& X, int i, int j, int N) {
    if (i == j || i < 1 || j < 1 || i > 3 || j > 3) throw std::invalid_argument("embed: factors must be distinct in 1..3");
    const int D = N * N * N;
    const int k = 6 - i - j;
    CMatrix out = CMatrix::Zero(D, D);
    auto index = [N](int a1, int a2, int a3) { return a1 + N * a2 + N * N * a3; };
    for (int a = 0; a < D; ++a) {
        int in[3] = {a % N, (a / N) % N, a / (N * N)};
        for (int b = 0; b < N * N; ++b) {
            // X maps the pair (ai, aj) = (x % N, x / N) to (b % N, b / N)
            const cplx w = X(b, in[i - 1] + N * in[j - 1]);
            if (w == cplx(0)) continue;
            int o[3];
            o[i - 1] = b % N;
            o[j - 1] = b / N;
            o[k - 1] = in[k - 1];
            out(index(o[0], o[1], o[2]), a) += w;
        }
    }
    return out;
}

double qybe_residual(const RMatrixFamily& fam, double u, double v, double hbar) {
    check_pole(u, "u");
    check_pole(v, "v");
    check_pole(u + v, "u + v");
    const int N = fam.N;
    CMatrix R12 = embed(fam(u, hbar), 1, 2, N), R13 = embed(fam(u + v, hbar), 1, 3, N),
            R23 = embed(fam(v, hbar), 2, 3, N);
    return (R12 * R13 * R23 - R23 * R13 * R12).norm();
}

Expansion semiclassical_extract(const RMatrixFamily& fam, double u, const std::vector<double>& hbars) {
    if (hbars.size() < 2) throw std::invalid_argument("semiclassical_extract: need at least two steps");
    const CMatrix R0 = fam(u, 0.0);
    std::vector<CMatrix> d1, d2;
    for (double h : hbars) {
        const CMatrix Rp = fam(u, h), Rm = fam(u, -h);
        d1.push_back((Rp - Rm) / (2 * h));
        d2.push_back((Rp - 2.0 * R0 + Rm) / (h * h));
    }
    // centred differences have even error expansions in h
    auto richardson = [&](std::vector<CMatrix> col) {
        double change = 0;
        for (std::size_t level = 1; level < hbars.size(); ++level) {
            std::vector<CMatrix> next;
            for (std::size_t m = 0; m + 1 < col.size(); ++m) {
                const double f = std::pow(hbars[m] / hbars[m + level], 2.0 * level);
                next.push_back((f * col[m + 1] - col[m]) / (f - 1));
            }
            change = (next.back() - col.back()).norm();
            col = std::move(next);
        }
        return std::make_pair(col.back(), change);
    };
    auto [dR, c1] = richardson(d1);
    auto [ddR, c2] = richardson(d2);
    const double scale = 1 + dR.norm() + ddR.norm();
    if (c1 > 1e-6 * scale || c2 > 1e-6 * scale)
        throw ExtrapolationError("semiclassical_extract: Richardson table did not settle");
    return {-I * dR, 0.5 * ddR};
}

double cybe_residual(const std::function<CMatrix(double)>& r, int N, double u, double v) {
    check_pole(u, "u");
    check_pole(v, "v");
    check_pole(u + v, "u + v");
    CMatrix r12 = embed(r(u), 1, 2, N), r13 = embed(r(u + v), 1, 3, N), r23 = embed(r(v), 2, 3, N);
    auto br = [](const CMatrix& a, const CMatrix& b) -> CMatrix { return a * b - b * a; };
    return (br(r12, r13) + br(r12, r23) + br(r13, r23)).norm();
}

double cybe_residual(const RMatrixFamily& fam, double u, double v) {
    return cybe_residual([&](double x) { return semiclassical_extract(fam, x).r; }, fam.N, u, v);
}

UnitarityData unitarity(const RMatrixFamily& fam, double u, double hbar) {
    const CMatrix P = flip(fam.N);
    const CMatrix prod = fam(u, hbar) * P * fam(-u, hbar) * P;
    const auto D = prod.rows();
    const cplx f = prod.trace() / static_cast<double>(D);
    return {f, (prod - f * CMatrix::Identity(D, D)).norm(), (fam(u, hbar) - P * fam(-u, -hbar) * P).norm()};
}

Report unitarity_proposition_check(const RMatrixFamily& fam, const std::vector<double>& us, double tol) {
    Report rep;
    rep.identity = "unitarity-proposition";
    rep.anchor = "R-matrix unitarity condition implies (1/2) r^2 + s is scalar";
    rep.parameters = {{"N", fam.N}, {"u", us}, {"tol", tol}};
    rep.pass = true;
    rep.witness = nlohmann::json::array();
    const double h = 0.05;
    for (double u : us) {
        nlohmann::json w{{"u", u}};
        double pre = 0;
        for (double hb : {0.1, 0.3}) {
            auto d = unitarity(fam, u, hb);
            pre = std::max({pre, d.defect, d.symmetry});
        }
        w["prerequisite_residual"] = pre;
        if (pre > tol) {
            w["status"] = "unitarity or symmetry fails";
            rep.pass = false;
            rep.witness.push_back(w);
            continue;
        }
        // f is even in hbar; f''(0) by Richardson on centred second differences
        auto fval = [&](double hb) { return unitarity(fam, u, hb).f; };
        const cplx f0 = fval(0);
        auto d2 = [&](double s) { return (fval(s) - 2.0 * f0 + fval(-s)) / (s * s); };
        const cplx fpp = (4.0 * d2(h / 2) - d2(h)) / 3.0;
        auto ex = semiclassical_extract(fam, u);
        const CMatrix lhs = 0.5 * ex.r * ex.r + ex.s;
        const auto D = lhs.rows();
        const cplx mean = lhs.trace() / static_cast<double>(D);
        const double scalar_defect = (lhs - mean * CMatrix::Identity(D, D)).norm();
        const double match = (lhs - 0.25 * fpp * CMatrix::Identity(D, D)).norm();
        w["scalar_defect"] = scalar_defect;
        w["match_residual"] = match;
        w["quarter_f2"] = {(0.25 * fpp).real(), (0.25 * fpp).imag()};
        if (scalar_defect > tol || match > tol) rep.pass = false;
        rep.witness.push_back(w);
    }
    return rep;
}

}  // namespace cmslab
