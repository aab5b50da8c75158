#include "cmslab/hybrid.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "cmslab/heckerep.hpp"

namespace cmslab {

namespace {

const cplx I(0, 1);

const CompiledSpinField& fourth_order_field(int n) {
    static std::mutex mu;
    static std::map<int, CompiledSpinField> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) {
        auto split = weyl_symbol(semiclassical_split(restrict_to_symmetric(symmetric_hamiltonian(4, n, OpKind::Quantum))));
        it = cache.emplace(n, CompiledSpinField(n, split.h1)).first;
    }
    return it->second;
}

PhasePoint shifted(const PhasePoint& x, const std::pair<std::vector<double>, std::vector<double>>& v, double a) {
    PhasePoint y = x;
    for (int i = 0; i < x.sites(); ++i) {
        y.p[i] += a * v.first[i];
        y.q[i] += a * v.second[i];
    }
    return y;
}

// The four classical RK4 stage points of the step x -> x + h.
std::array<PhasePoint, 4> stages(const std::vector<std::pair<int, double>>& w, const PhasePoint& x, double h) {
    auto k1 = flow_velocity(w, x);
    PhasePoint x2 = shifted(x, k1, h / 2);
    auto k2 = flow_velocity(w, x2);
    PhasePoint x3 = shifted(x, k2, h / 2);
    auto k3 = flow_velocity(w, x3);
    return {x, x2, x3, shifted(x, k3, h)};
}

// Generic RK4 for dy/dt = f(H(x(t)), y) along the stored trajectory.
template <class Y, class Rhs, class Obs>
Y march(const Trajectory& tr, int N, Y y, Rhs rhs, Obs observe) {
    for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
        const double h = tr.t[i + 1] - tr.t[i];
        const auto& w = tr.segments[tr.segment[i + 1]].weights;
        auto xs = stages(w, tr.x[i], h);
        std::array<SpinOperator, 4> H{quantum_field(w, xs[0], N), quantum_field(w, xs[1], N),
                                      quantum_field(w, xs[2], N), quantum_field(w, xs[3], N)};
        Y k1 = rhs(H[0], xs[0], y);
        Y k2 = rhs(H[1], xs[1], Y(y + (h / 2) * k1));
        Y k3 = rhs(H[2], xs[2], Y(y + (h / 2) * k2));
        Y k4 = rhs(H[3], xs[3], Y(y + h * k3));
        y = y + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        observe(i + 1, y);
    }
    return y;
}

Trajectory make_flow(const PhasePoint& x0, const std::vector<FlowSegment>& segments, double step) {
    FlowOptions opt;
    opt.step = step;
    return flow(x0, segments, opt);
}

CMatrix dense_field(const SpinOperator& H) { return H.to_dense(); }

// Hermitian iff the weight of sigma^-1 is the conjugate weight of sigma.
void require_hermitian_words(const SpinOperator& H, int k) {
    std::map<SiteMap, cplx> w;
    for (const auto& x : H.word_list()) w[x.sigma] += x.weight;
    for (const auto& [s, c] : w) {
        auto it = w.find(inverse(s));
        cplx d = it == w.end() ? 0.0 : it->second;
        if (std::abs(c - std::conj(d)) > 1e-12 * std::max(1.0, std::abs(c)))
            throw std::logic_error("quantum_hamiltonian: H" + std::to_string(k) + " is not Hermitian");
    }
}

}  // namespace

SpinOperator quantum_hamiltonian(int k, const PhasePoint& x, int N) {
    const int n = x.sites();
    if (k < 1) throw std::invalid_argument("quantum_hamiltonian: k must be >= 1");
    if (k > 4) throw CostGuardError("quantum_hamiltonian: k > 4 exceeds the symbolic budget");
    if (x.min_separation() < kCollisionThreshold) throw CollisionError("quantum_hamiltonian at a collision");
    std::vector<WeightedWord> ws;
    if (k == 2) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) ws.push_back({-pair_weight(x, i, j), transposition_map(n, i, j)});
    } else if (k == 3) {
        auto z = x.z();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                ws.push_back({-pair_weight(x, i, j) * x.p[i], transposition_map(n, i, j)});
                for (int l = 0; l < n; ++l) {
                    if (l == i || l == j) continue;
                    cplx c = z[i] * z[j] * z[l] / ((z[i] - z[j]) * (z[j] - z[l]) * (z[l] - z[i]));
                    ws.push_back({-c / 3.0, compose(transposition_map(n, j, l), transposition_map(n, i, j))});
                }
            }
    } else if (k == 4) {
        if (n > 4) throw CostGuardError("quantum_hamiltonian: k = 4 limited to n <= 4");
        SpinOperator H = fourth_order_field(n)(x.p, x.z(), N);
        require_hermitian_words(H, k);
        return H;
    }
    SpinOperator H = SpinOperator::words(n, N, std::move(ws));
    require_hermitian_words(H, k);
    return H;
}

SpinOperator quantum_field(const std::vector<std::pair<int, double>>& weights, const PhasePoint& x, int N) {
    SpinOperator H(x.sites(), N);
    for (const auto& [k, c] : weights) H += quantum_hamiltonian(k, x, N) * cplx(c);
    return H;
}

TransportResult transport(const Trajectory& tr, const SpinVector& psi0, const TransportOptions& opt) {
    if (tr.size() == 0) throw std::invalid_argument("transport: empty trajectory");
    const int n = psi0.sites(), N = psi0.local_dim();
    if (tr.x.front().sites() != n) throw std::invalid_argument("transport: site count mismatch");
    TransportResult r;
    r.trajectory = tr;
    r.psi.reserve(tr.size());
    r.psi.push_back(psi0);
    const double norm0 = psi0.norm();
    auto rhs = [](const SpinOperator& H, const PhasePoint&, const CVector& y) -> CVector {
        return -I * H.apply(SpinVector(H.sites(), H.local_dim(), y)).amplitudes();
    };
    march(tr, N, psi0.amplitudes(), rhs, [&](std::size_t i, const CVector& y) {
        double drift = std::abs(y.norm() - norm0);
        r.max_norm_drift = std::max(r.max_norm_drift, drift);
        if (drift > opt.norm_guard)
            throw NumericalGuardError("transport: norm drift " + std::to_string(drift) + " at t = " +
                                      std::to_string(tr.t[i]));
        r.psi.emplace_back(n, N, y);
    });
    if (opt.track_propagator) r.V = propagator(tr, N);
    return r;
}

TransportResult transport(const PhasePoint& x0, const SpinVector& psi0, const std::vector<FlowSegment>& segments,
                          double step, const TransportOptions& opt) {
    return transport(make_flow(x0, segments, step), psi0, opt);
}

void write_csv(std::ostream& os, const TransportResult& r) {
    const auto& tr = r.trajectory;
    const int n = tr.x.front().sites();
    const std::size_t d = r.psi.front().dim();
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",p" << i;
    for (int i = 1; i <= n; ++i) os << ",q" << i;
    for (std::size_t a = 0; a < d; ++a) os << ",re" << a << ",im" << a;
    os << ",norm,fidelity\n";
    os.precision(17);
    for (std::size_t s = 0; s < tr.size(); ++s) {
        os << tr.t[s];
        for (double v : tr.x[s].p) os << ',' << v;
        for (double v : tr.x[s].q) os << ',' << v;
        const auto& a = r.psi[s].amplitudes();
        for (Eigen::Index i = 0; i < a.size(); ++i) os << ',' << a[i].real() << ',' << a[i].imag();
        os << ',' << r.psi[s].norm() << ',' << std::norm(r.psi.front().dot(r.psi[s])) << '\n';
    }
}

CMatrix propagator(const Trajectory& tr, int N, const ScalarField& shift) {
    const auto D = static_cast<Eigen::Index>(spin_dim(tr.x.front().sites(), N));
    auto rhs = [&](const SpinOperator& H, const PhasePoint& x, const CMatrix& V) -> CMatrix {
        CMatrix HV = dense_field(H) * V;
        if (shift) HV += shift(x) * V;
        return -I * HV;
    };
    return march(tr, N, CMatrix(CMatrix::Identity(D, D)), rhs, [](std::size_t, const CMatrix&) {});
}

CMatrix heisenberg_propagator(const Trajectory& tr, int N) {
    const auto D = static_cast<Eigen::Index>(spin_dim(tr.x.front().sites(), N));
    auto rhs = [](const SpinOperator& H, const PhasePoint&, const CMatrix& U) -> CMatrix {
        return I * (U * dense_field(H));
    };
    return march(tr, N, CMatrix(CMatrix::Identity(D, D)), rhs, [](std::size_t, const CMatrix&) {});
}

namespace {

PhasePoint flow_by(int k, const PhasePoint& x, double t) {
    const auto steps = std::max<long>(1, static_cast<long>(std::ceil(std::abs(t) / 1e-3)));
    PhasePoint y = x;
    for (long i = 0; i < steps; ++i) y = rk4_step({{k, 1.0}}, y, t / static_cast<double>(steps));
    return y;
}

}  // namespace

double zero_curvature_residual(const PhasePoint& x0, int k, int l, int N, double h) {
    if (!(h > 0)) throw std::invalid_argument("zero_curvature_residual: h must be positive");
    CMatrix dkHl = (quantum_hamiltonian(l, flow_by(k, x0, h), N).to_dense() -
                    quantum_hamiltonian(l, flow_by(k, x0, -h), N).to_dense()) / (2 * h);
    CMatrix dlHk = (quantum_hamiltonian(k, flow_by(l, x0, h), N).to_dense() -
                    quantum_hamiltonian(k, flow_by(l, x0, -h), N).to_dense()) / (2 * h);
    CMatrix Hk = quantum_hamiltonian(k, x0, N).to_dense();
    CMatrix Hl = quantum_hamiltonian(l, x0, N).to_dense();
    return (dkHl - dlHk + I * (Hk * Hl - Hl * Hk)).norm();
}

OrderDiscrepancy order_of_flows(const PhasePoint& x0, const SpinVector& psi0, int k, double tk, int l, double tl,
                                double step) {
    auto a = transport(x0, psi0, {FlowSegment::single(k, tk), FlowSegment::single(l, tl)}, step);
    auto b = transport(x0, psi0, {FlowSegment::single(l, tl), FlowSegment::single(k, tk)}, step);
    OrderDiscrepancy d;
    d.spin = (a.final_state().amplitudes() - b.final_state().amplitudes()).norm();
    d.classical = phase_distance(a.trajectory.x.back(), b.trajectory.x.back());
    return d;
}

CMatrix heisenberg_evolve(const OperatorField& s, const PhasePoint& x0, const std::vector<FlowSegment>& segments,
                          int N, double step) {
    auto tr = make_flow(x0, segments, step);
    CMatrix U = heisenberg_propagator(tr, N);
    return U * s(tr.x.back()).to_dense() * U.inverse();
}

PointDensity density_evolve(const PointDensity& rho0, const std::vector<FlowSegment>& segments, int N, double step) {
    auto tr = make_flow(rho0.x, segments, step);
    const cplx tr0 = rho0.rho.trace();
    auto rhs = [](const SpinOperator& H, const PhasePoint&, const CMatrix& r) -> CMatrix {
        CMatrix h = dense_field(H);
        return -I * (h * r - r * h);
    };
    CMatrix rho = march(tr, N, rho0.rho, rhs, [&](std::size_t i, const CMatrix& r) {
        if (std::abs(r.trace() - tr0) > 1e-8)
            throw NumericalGuardError("density_evolve: trace drift at t = " + std::to_string(tr.t[i]));
    });
    Eigen::SelfAdjointEigenSolver<CMatrix> es(CMatrix((rho + rho.adjoint()) / 2.0), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8) throw NumericalGuardError("density_evolve: lost positivity");
    return {tr.x.back(), rho};
}

cplx expectation_value(const PointDensity& rho, const OperatorField& s) {
    return (rho.rho * s(rho.x).to_dense()).trace();
}

Report gauge_shift_check(const std::string& scenario, const PhasePoint& x0, const SpinVector& psi0,
                         const std::vector<FlowSegment>& segments, const ScalarField& z, double step, double tol) {
    auto tr = make_flow(x0, segments, step);
    const int N = psi0.local_dim();
    CVector v = propagator(tr, N) * psi0.amplitudes();
    CVector w = propagator(tr, N, z) * psi0.amplitudes();
    // theta by Simpson's rule on each stored step, midpoints from an independent half step
    double theta = 0;
    for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
        const double h = tr.t[i + 1] - tr.t[i];
        PhasePoint mid = rk4_step(tr.segments[tr.segment[i + 1]].weights, tr.x[i], h / 2);
        theta += h / 6 * (z(tr.x[i]) + 4 * z(mid) + z(tr.x[i + 1]));
    }
    const double residual = (w - std::exp(-I * theta) * v).norm();
    const double literal = (w - std::exp(I * theta) * v).norm();
    Report r;
    r.identity = "gauge-shift:" + scenario;
    r.anchor = "gauge invariance under scalar shifts of the quantum Hamiltonian";
    r.parameters = {{"n", x0.sites()}, {"N", N}, {"step", step}, {"tol", tol}};
    r.pass = residual <= tol;
    r.witness = {{"theta", theta}, {"residual", residual}, {"residual_with_phase_exp_plus_i_theta", literal}};
    return r;
}

CMatrix monodromy(const Trajectory& orbit, int N, double closure_tol) {
    if (orbit.size() < 2) throw std::invalid_argument("monodromy: empty orbit");
    const double gap = phase_distance(orbit.x.front(), orbit.x.back());
    if (gap > closure_tol)
        throw std::invalid_argument("monodromy: orbit does not close (gap " + std::to_string(gap) + ")");
    return heisenberg_propagator(orbit, N);
}

SpinOperator haldane_shastry(int k, int n, int N) { return quantum_hamiltonian(k, freezing_point(n), N); }

SiteMap cyclic_shift(int n) {
    SiteMap s(n);
    for (int i = 0; i < n; ++i) s[i] = (i + 1) % n;
    return s;
}

}  // namespace cmslab
