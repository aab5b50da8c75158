#include "cmslab/classical.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>

namespace cmslab {

std::vector<cplx> PhasePoint::z() const {
    std::vector<cplx> r(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) r[i] = std::polar(1.0, q[i]);
    return r;
}

double PhasePoint::min_separation() const {
    double m = INFINITY;
    for (int i = 0; i < sites(); ++i)
        for (int j = 0; j < i; ++j) m = std::min(m, 2 * std::abs(std::sin((q[i] - q[j]) / 2)));
    return m;
}

namespace {

void guard(const PhasePoint& x) {
    if (x.p.size() != x.q.size()) throw std::invalid_argument("phase point: p and q lengths differ");
    if (x.min_separation() < kCollisionThreshold) throw CollisionError("coordinates collide");
}

CMatrix matrix_power(const CMatrix& L, int e) {
    CMatrix r = CMatrix::Identity(L.rows(), L.cols());
    for (int i = 0; i < e; ++i) r = r * L;
    return r;
}

}  // namespace

double pair_weight(const PhasePoint& x, int i, int j) {
    double s = std::sin((x.q[i] - x.q[j]) / 2);
    return -1.0 / (4 * s * s);
}

LaxData lax(const PhasePoint& x) {
    guard(x);
    const int n = x.sites();
    auto z = x.z();
    LaxData d{CMatrix::Zero(n, n), CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
    for (int i = 0; i < n; ++i) {
        d.P(i, i) = x.p[i];
        for (int j = 0; j < n; ++j)
            if (i != j) d.M(i, j) = z[i] / (z[i] - z[j]);
    }
    d.L = d.P + d.M;
    return d;
}

double hamiltonian(int k, const PhasePoint& x) {
    if (k < 1) throw std::invalid_argument("hamiltonian index must be >= 1");
    CMatrix L = lax(x).L;
    cplx tr = matrix_power(L, k).trace() / static_cast<double>(k);
    if (std::abs(tr.imag()) > 1e-9 * (1 + std::abs(tr.real())))
        throw std::domain_error("Hamiltonian is not real: phase point is off the real torus");
    return tr.real();
}

Gradient grad_hamiltonian(int k, const PhasePoint& x) {
    if (k < 1) throw std::invalid_argument("hamiltonian index must be >= 1");
    const int n = x.sites();
    CMatrix A = matrix_power(lax(x).L, k - 1);
    Gradient g{std::vector<double>(n), std::vector<double>(n)};
    for (int m = 0; m < n; ++m) {
        g.dp[m] = A(m, m).real();
        cplx e = 0;
        for (int j = 0; j < n; ++j)
            if (j != m) e += pair_weight(x, m, j) * (A(m, j) - A(j, m));
        g.dq[m] = (cplx(0, 1) * e).real();
    }
    return g;
}

double poisson_bracket(const Gradient& f, const Gradient& g) {
    double s = 0;
    for (std::size_t j = 0; j < f.dp.size(); ++j) s += f.dp[j] * g.dq[j] - g.dp[j] * f.dq[j];
    return s;
}

double Trajectory::max_drift(int k) const {
    if (k < 1 || H.empty() || k > static_cast<int>(H.front().size())) throw std::out_of_range("H index not monitored");
    double d = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < size(); ++i) {
        if (segment[i] != segment[start]) start = i;
        d = std::max(d, std::abs(H[i][k - 1] - H[start][k - 1]));
    }
    return d;
}

std::pair<std::vector<double>, std::vector<double>> flow_velocity(const std::vector<std::pair<int, double>>& weights,
                                                                  const PhasePoint& x) {
    const int n = x.sites();
    std::vector<double> dp(n, 0.0), dq(n, 0.0);
    for (const auto& [k, c] : weights) {
        if (c == 0) continue;
        Gradient g = grad_hamiltonian(k, x);
        for (int i = 0; i < n; ++i) {
            dq[i] += c * g.dp[i];
            dp[i] -= c * g.dq[i];
        }
    }
    return {dp, dq};
}

PhasePoint rk4_step(const std::vector<std::pair<int, double>>& weights, const PhasePoint& x, double h) {
    const int n = x.sites();
    auto shifted = [&](const std::pair<std::vector<double>, std::vector<double>>& v, double a) {
        PhasePoint y = x;
        for (int i = 0; i < n; ++i) {
            y.p[i] += a * v.first[i];
            y.q[i] += a * v.second[i];
        }
        return y;
    };
    auto k1 = flow_velocity(weights, x);
    auto k2 = flow_velocity(weights, shifted(k1, h / 2));
    auto k3 = flow_velocity(weights, shifted(k2, h / 2));
    auto k4 = flow_velocity(weights, shifted(k3, h));
    PhasePoint y = x;
    for (int i = 0; i < n; ++i) {
        y.p[i] += h / 6 * (k1.first[i] + 2 * k2.first[i] + 2 * k3.first[i] + k4.first[i]);
        y.q[i] += h / 6 * (k1.second[i] + 2 * k2.second[i] + 2 * k3.second[i] + k4.second[i]);
    }
    return y;
}

namespace {

void record(Trajectory& tr, double t, int seg, const PhasePoint& x, int monitored) {
    tr.t.push_back(t);
    tr.segment.push_back(seg);
    tr.x.push_back(x);
    std::vector<double> h(monitored);
    for (int k = 1; k <= monitored; ++k) h[k - 1] = hamiltonian(k, x);
    tr.H.push_back(std::move(h));
}

// Every accepted leaf step is recorded, so consecutive points are exactly one RK4 step apart.
PhasePoint guarded_step(const std::vector<std::pair<int, double>>& w, const PhasePoint& x, double h,
                        const FlowOptions& opt, Trajectory& tr, double& t, int seg) {
    if (x.min_separation() >= opt.halving_distance) {
        PhasePoint y = rk4_step(w, x, h);
        if (y.min_separation() < kCollisionThreshold) throw FlowError("collision during integration", tr);
        t += h;
        record(tr, t, seg, y, opt.monitored);
        return y;
    }
    if (h / 2 < opt.min_step) throw FlowError("step size underflow near a collision", tr);
    PhasePoint mid = guarded_step(w, x, h / 2, opt, tr, t, seg);
    return guarded_step(w, mid, h / 2, opt, tr, t, seg);
}

}  // namespace

Trajectory flow(const PhasePoint& x0, const std::vector<FlowSegment>& segments, const FlowOptions& opt) {
    if (!(opt.step > 0)) throw std::invalid_argument("flow step must be positive");
    guard(x0);
    Trajectory tr;
    tr.segments = segments;
    double t = 0;
    PhasePoint x = x0;
    record(tr, t, 0, x, opt.monitored);
    for (std::size_t s = 0; s < segments.size(); ++s) {
        const auto& seg = segments[s];
        if (seg.duration < 0) throw std::invalid_argument("segment duration must be non-negative");
        if (seg.duration == 0) continue;
        auto steps = static_cast<long>(std::ceil(seg.duration / opt.step - 1e-9));
        double h = seg.duration / static_cast<double>(steps);
        for (long i = 0; i < steps; ++i) {
            x = guarded_step(seg.weights, x, h, opt, tr, t, static_cast<int>(s));
        }
    }
    return tr;
}

PhasePoint freezing_point(int n) {
    if (n < 2) throw std::invalid_argument("freezing point needs n >= 2");
    PhasePoint x{std::vector<double>(n, 0.0), std::vector<double>(n)};
    for (int k = 1; k <= n; ++k) x.q[k - 1] = 2 * std::numbers::pi * k / n;
    return x;
}

std::vector<cplx> generating_F(const PhasePoint& x, double lambda) {
    const int n = x.sites();
    CMatrix A = lax(x).L + lambda * CMatrix::Identity(n, n);
    std::vector<cplx> F(n);
    for (int i = 0; i < n; ++i) {
        if (n == 1) {
            F[i] = 1.0;
            continue;
        }
        CMatrix minor(n - 1, n - 1);
        for (int r = 0, rr = 0; r < n; ++r) {
            if (r == i) continue;
            for (int c = 0, cc = 0; c < n; ++c) {
                if (c == i) continue;
                minor(rr, cc++) = A(r, c);
            }
            ++rr;
        }
        F[i] = minor.determinant();
    }
    return F;
}

std::vector<cplx> generating_G(const PhasePoint& x, double lambda) {
    const int n = x.sites();
    CMatrix A = lax(x).L + lambda * CMatrix::Identity(n, n);
    std::vector<cplx> G(n);
    const cplx I(0, 1);
    for (int i = 0; i < n; ++i) {
        // d/dq_i touches row i and column i only; d M_ij = -i w_ij, d M_ji = i w_ij.
        CMatrix row = A, col = A;
        for (int j = 0; j < n; ++j) {
            row(i, j) = j == i ? 0.0 : -I * pair_weight(x, i, j);
            col(j, i) = j == i ? 0.0 : I * pair_weight(x, i, j);
        }
        G[i] = row.determinant() + col.determinant();
    }
    return G;
}

std::vector<Report> verify_fixed_point(int n, const std::vector<double>& lambdas, double tol) {
    if (n < 2 || n > 12) throw std::invalid_argument("verify_fixed_point supports 2 <= n <= 12");
    PhasePoint x = freezing_point(n);
    std::vector<Report> out;
    for (double lam : lambdas) {
        auto F = generating_F(x, lam);
        auto G = generating_G(x, lam);
        double spread = 0, gmax = 0;
        for (int i = 0; i < n; ++i) {
            spread = std::max(spread, std::abs(F[i] - F[0]));
            gmax = std::max(gmax, std::abs(G[i]));
        }
        nlohmann::json params = {{"n", n}, {"lambda", lam}, {"tol", tol}};
        out.push_back({"F_i(lambda, 0, zeta) equal across i", "derivatives of the generating function at the fixed point",
                       params, spread <= tol, {{"spread", spread}}});
        out.push_back({"G_i(lambda, 0, zeta) = 0", "derivatives of the generating function at the fixed point", params,
                       gmax <= tol, {{"max_abs", gmax}}});
    }
    for (int k = 2; k <= n; ++k) {
        Gradient g = grad_hamiltonian(k, x);
        double qmax = 0, pspread = 0;
        for (int i = 0; i < n; ++i) {
            qmax = std::max(qmax, std::abs(g.dq[i]));
            pspread = std::max(pspread, std::abs(g.dp[i] - g.dp[0]));
        }
        out.push_back({"dH_" + std::to_string(k) + "(x_*) in span dH_1", "fixed point of the multi-time evolution",
                       {{"n", n}, {"k", k}, {"tol", tol}},
                       std::max(qmax, pspread) <= tol,
                       {{"max_dq", qmax}, {"dp_spread", pspread}}});
    }
    return out;
}

void write_csv(std::ostream& os, const Trajectory& tr) {
    if (tr.x.empty()) return;
    const int n = tr.x.front().sites();
    const int m = static_cast<int>(tr.H.front().size());
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",p_" << i;
    for (int i = 1; i <= n; ++i) os << ",q_" << i;
    for (int k = 1; k <= m; ++k) os << ",H_" << k;
    os << "\n" << std::setprecision(17);
    for (std::size_t s = 0; s < tr.size(); ++s) {
        os << tr.t[s];
        for (double v : tr.x[s].p) os << "," << v;
        for (double v : tr.x[s].q) os << "," << v;
        for (double v : tr.H[s]) os << "," << v;
        os << "\n";
    }
}

double phase_distance(const PhasePoint& a, const PhasePoint& b) {
    double d = 0;
    for (int i = 0; i < a.sites(); ++i) {
        d = std::max(d, std::abs(a.p[i] - b.p[i]));
        d = std::max(d, std::abs(std::remainder(a.q[i] - b.q[i], 2 * std::numbers::pi)));
    }
    return d;
}

}  // namespace cmslab
