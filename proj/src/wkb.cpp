#include "cmslab/wkb.hpp"

#include <cmath>
#include <exception>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

namespace cmslab {

namespace {

const cplx I(0, 1);

}  // namespace

Smooth Smooth::constant(double c) {
    return {[c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
}

Smooth Smooth::linear(double a, double b) {
    return {[a, b](double q) { return a * q + b; }, [a](double) { return a; }, [](double) { return 0.0; }};
}

Smooth Smooth::cosine(double amp, double freq, double phase) {
    return {[=](double q) { return amp * std::cos(freq * q + phase); },
            [=](double q) { return -amp * freq * std::sin(freq * q + phase); },
            [=](double q) { return -amp * freq * freq * std::cos(freq * q + phase); }};
}

Smooth Smooth::gaussian_bump(double amp, double width) {
    const double w2 = width * width;
    return {[=](double q) { return amp * std::exp(-q * q / (2 * w2)); },
            [=](double q) { return -amp * q / w2 * std::exp(-q * q / (2 * w2)); },
            [=](double q) { return amp * (q * q / w2 - 1) / w2 * std::exp(-q * q / (2 * w2)); }};
}

double WKBProblem::H0(double p, double q) const {
    double s = 0, pk = 1;
    for (int k = 0; k < 5; ++k, pk *= p) s += A[k].f(q) * pk;
    return s;
}

double WKBProblem::dH0_dp(double p, double q) const {
    double s = 0, pk = 1;
    for (int k = 1; k < 5; ++k, pk *= p) s += k * A[k].f(q) * pk;
    return s;
}

double WKBProblem::dH0_dq(double p, double q) const {
    double s = 0, pk = 1;
    for (int k = 0; k < 5; ++k, pk *= p) s += A[k].df(q) * pk;
    return s;
}

double WKBProblem::d2H0_dp2(double p, double q) const {
    double s = 0, pk = 1;
    for (int k = 2; k < 5; ++k, pk *= p) s += k * (k - 1) * A[k].f(q) * pk;
    return s;
}

double WKBProblem::d2H0_dpdq(double p, double q) const {
    double s = 0, pk = 1;
    for (int k = 1; k < 5; ++k, pk *= p) s += k * A[k].df(q) * pk;
    return s;
}

double WKBProblem::d2H0_dq2(double p, double q) const {
    double s = 0, pk = 1;
    for (int k = 0; k < 5; ++k, pk *= p) s += A[k].d2f(q) * pk;
    return s;
}

WKBProblem WKBProblem::kinetic(Smooth V, std::function<CMatrix(double, double)> H1, Smooth f,
                               std::function<CVector(double)> phi, int N) {
    WKBProblem pr;
    pr.A = {std::move(V), Smooth::constant(0), Smooth::constant(0.5), Smooth::constant(0), Smooth::constant(0)};
    pr.H1 = std::move(H1);
    pr.f = std::move(f);
    pr.phi = std::move(phi);
    pr.N = N;
    return pr;
}

namespace {

struct Phase {
    double q, p, dq, dp;
};

Phase velocity(const WKBProblem& pr, const Phase& y) {
    const double hpp = pr.d2H0_dp2(y.p, y.q), hpq = pr.d2H0_dpdq(y.p, y.q), hqq = pr.d2H0_dq2(y.p, y.q);
    return {pr.dH0_dp(y.p, y.q), -pr.dH0_dq(y.p, y.q), hpq * y.dq + hpp * y.dp, -hqq * y.dq - hpq * y.dp};
}

Phase axpy(const Phase& y, double a, const Phase& k) {
    return {y.q + a * k.q, y.p + a * k.p, y.dq + a * k.dq, y.dp + a * k.dp};
}

// RK4 stage points of one step, used both for the step and for coupled transport.
std::array<Phase, 4> stage_points(const WKBProblem& pr, const Phase& y, double h, std::array<Phase, 4>& k) {
    k[0] = velocity(pr, y);
    Phase y2 = axpy(y, h / 2, k[0]);
    k[1] = velocity(pr, y2);
    Phase y3 = axpy(y, h / 2, k[1]);
    k[2] = velocity(pr, y3);
    Phase y4 = axpy(y, h, k[2]);
    k[3] = velocity(pr, y4);
    return {y, y2, y3, y4};
}

Phase rk4(const WKBProblem& pr, const Phase& y, double h) {
    std::array<Phase, 4> k;
    stage_points(pr, y, h, k);
    return {y.q + h / 6 * (k[0].q + 2 * k[1].q + 2 * k[2].q + k[3].q),
            y.p + h / 6 * (k[0].p + 2 * k[1].p + 2 * k[2].p + k[3].p),
            y.dq + h / 6 * (k[0].dq + 2 * k[1].dq + 2 * k[2].dq + k[3].dq),
            y.dp + h / 6 * (k[0].dp + 2 * k[1].dp + 2 * k[2].dp + k[3].dp)};
}

double endpoint(const WKBProblem& pr, double q0, double t, int steps) {
    Phase y{q0, pr.f.df(q0), 1, pr.f.d2f(q0)};
    const double h = t / steps;
    for (int i = 0; i < steps; ++i) y = rk4(pr, y, h);
    return y.q;
}

void check_steps(int steps) {
    if (steps < 2 || steps % 2) throw std::invalid_argument("WKB: trajectory step count must be even and >= 2");
}

}  // namespace

WKBBranch integrate_branch(const WKBProblem& pr, double q0, double t, int steps) {
    check_steps(steps);
    WKBBranch b;
    b.q0 = q0;
    Phase y{q0, pr.f.df(q0), 1, pr.f.d2f(q0)};
    const double h = t / steps;
    auto push = [&](double tau) {
        b.tau.push_back(tau);
        b.q.push_back(y.q);
        b.p.push_back(y.p);
        b.dq.push_back(y.dq);
        b.dp.push_back(y.dp);
    };
    push(0);
    for (int i = 1; i <= steps; ++i) {
        y = rk4(pr, y, h);
        push(i * h);
    }
    return b;
}

double hj_action(const WKBProblem& pr, const WKBBranch& b) {
    const std::size_t m = b.tau.size() - 1;
    if (m == 0) return pr.f(b.q0);
    if (m % 2) throw std::invalid_argument("hj_action: Simpson's rule needs an even number of intervals");
    const double h = b.tau[1] - b.tau[0];
    auto L = [&](std::size_t i) { return b.p[i] * pr.dH0_dp(b.p[i], b.q[i]) - pr.H0(b.p[i], b.q[i]); };
    double s = L(0) + L(m);
    for (std::size_t i = 1; i < m; ++i) s += (i % 2 ? 4 : 2) * L(i);
    return s * h / 3 + pr.f(b.q0);
}

void amplitude_and_maslov(WKBBranch& b, double caustic_tol) {
    const double J = b.jacobian();
    b.caustic = std::abs(J) < caustic_tol;
    b.D = b.caustic ? 0.0 : 1 / std::sqrt(std::abs(J));
    b.mu = 0;
    double last = b.dq.front();
    for (std::size_t i = 1; i < b.dq.size(); ++i) {
        if (b.dq[i] == 0) continue;
        if ((b.dq[i] > 0) != (last > 0)) ++b.mu;
        last = b.dq[i];
    }
}

CVector transport_vector(const WKBProblem& pr, const WKBBranch& b) {
    CVector psi = pr.phi(b.q0);
    for (std::size_t i = 0; i + 1 < b.tau.size(); ++i) {
        const double h = b.tau[i + 1] - b.tau[i];
        std::array<Phase, 4> k;
        auto x = stage_points(pr, {b.q[i], b.p[i], b.dq[i], b.dp[i]}, h, k);
        auto f = [&](int s, const CVector& v) -> CVector { return -I * (pr.H1(x[s].p, x[s].q) * v); };
        CVector k1 = f(0, psi);
        CVector k2 = f(1, psi + h / 2 * k1);
        CVector k3 = f(2, psi + h / 2 * k2);
        CVector k4 = f(3, psi + h * k3);
        psi += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const double drift = std::abs(psi.norm() - pr.phi(b.q0).norm());
    if (drift > 1e-6) throw NumericalGuardError("transport_vector: norm drift " + std::to_string(drift));
    return psi;
}

EndpointScan scan_endpoints(const WKBProblem& pr, double t, const WKBOptions& opt) {
    check_steps(opt.steps);
    if (opt.scan_points < 2) throw std::invalid_argument("scan_endpoints: need at least two scan points");
    EndpointScan s;
    s.t = t;
    s.q0.resize(opt.scan_points);
    s.q.resize(opt.scan_points);
    const double dq = (pr.support_hi - pr.support_lo) / (opt.scan_points - 1);
    for (int i = 0; i < opt.scan_points; ++i) {
        s.q0[i] = pr.support_lo + i * dq;
        s.q[i] = endpoint(pr, s.q0[i], t, opt.steps);
    }
    return s;
}

namespace {

WKBBranch complete_branch(const WKBProblem& pr, double q0, double t, const WKBOptions& opt) {
    WKBBranch b = integrate_branch(pr, q0, t, opt.steps);
    b.S = hj_action(pr, b);
    amplitude_and_maslov(b, opt.caustic_tol);
    b.Psi = transport_vector(pr, b);
    return b;
}

// Illinois variant of regula falsi on a sign-changing bracket.
double refine(const WKBProblem& pr, double t, double q, double a, double fa, double b, double fb,
              const WKBOptions& opt) {
    int side = 0;
    for (int it = 0; it < 100; ++it) {
        const double c = (a * fb - b * fa) / (fb - fa);
        const double fc = endpoint(pr, c, t, opt.steps) - q;
        if (std::abs(fc) <= opt.root_tol || std::abs(b - a) <= opt.root_tol) return c;
        if ((fc > 0) == (fb > 0)) {
            b = c;
            fb = fc;
            if (side == -1) fa /= 2;
            side = -1;
        } else {
            a = c;
            fa = fc;
            if (side == 1) fb /= 2;
            side = 1;
        }
    }
    return (a * fb - b * fa) / (fb - fa);
}

}  // namespace

std::vector<WKBBranch> shoot(const WKBProblem& pr, const EndpointScan& scan, double q, const WKBOptions& opt) {
    std::vector<WKBBranch> out;
    const double t = scan.t;
    if (t == 0) {
        if (q < pr.support_lo || q > pr.support_hi) return out;
        WKBBranch b;
        b.q0 = q;
        b.tau = {0};
        b.q = {q};
        b.p = {pr.f.df(q)};
        b.dq = {1};
        b.dp = {pr.f.d2f(q)};
        b.S = pr.f(q);
        amplitude_and_maslov(b, opt.caustic_tol);
        b.Psi = pr.phi(q);
        out.push_back(std::move(b));
        return out;
    }
    for (std::size_t j = 0; j < scan.q0.size(); ++j) {
        const double g = scan.q[j] - q;
        if (g == 0) {
            out.push_back(complete_branch(pr, scan.q0[j], t, opt));
            continue;
        }
        if (j + 1 == scan.q0.size()) break;
        const double g1 = scan.q[j + 1] - q;
        if (g1 != 0 && (g > 0) != (g1 > 0)) {
            const double q0 = refine(pr, t, q, scan.q0[j], g, scan.q0[j + 1], g1, opt);
            out.push_back(complete_branch(pr, q0, t, opt));
        }
    }
    return out;
}

std::vector<WKBBranch> shoot(const WKBProblem& pr, double q, double t, const WKBOptions& opt) {
    return shoot(pr, scan_endpoints(pr, t, opt), q, opt);
}

std::vector<double> PeriodicGrid::points() const {
    std::vector<double> x(M);
    for (int i = 0; i < M; ++i) x[i] = point(i);
    return x;
}

namespace {

cplx maslov_phase(int mu, MaslovConvention mc) {
    const double pi = std::numbers::pi;
    return mc == MaslovConvention::FocalPoints ? std::exp(-I * (pi / 2 * mu)) : std::exp(I * (pi / 4 * mu));
}

std::vector<GridWavefunction> empty_fields(const PeriodicGrid& grid, std::size_t count, int N) {
    GridWavefunction w;
    w.q = grid.points();
    w.psi = CMatrix::Zero(grid.M, N);
    w.valid.assign(grid.M, true);
    return std::vector<GridWavefunction>(count, w);
}

void assemble_target(const WKBProblem& pr, const EndpointScan& scan, int i, double q, const std::vector<double>& hbars,
                     const WKBOptions& opt, MaslovConvention mc, std::vector<GridWavefunction>& out) {
    auto branches = shoot(pr, scan, q, opt);
    for (std::size_t h = 0; h < hbars.size(); ++h) {
        CVector v = CVector::Zero(pr.N);
        bool valid = true;
        for (const auto& b : branches) {
            if (b.caustic) {
                valid = false;
                continue;
            }
            v += b.D * std::exp(I * (b.S / hbars[h])) * maslov_phase(b.mu, mc) * b.Psi;
        }
        out[h].psi.row(i) = v.transpose();
        out[h].valid[i] = valid;
    }
}

}  // namespace

std::vector<GridWavefunction> assemble(const WKBProblem& pr, const PeriodicGrid& grid, double t,
                                       const std::vector<double>& hbars, const WKBOptions& opt, MaslovConvention mc) {
    auto scan = scan_endpoints(pr, t, opt);
    auto out = empty_fields(grid, hbars.size(), pr.N);
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < grid.M; ++i) {
        try {
            assemble_target(pr, scan, i, grid.point(i), hbars, opt, mc, out);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
}

std::vector<GridWavefunction> assemble_serial(const WKBProblem& pr, const PeriodicGrid& grid, double t,
                                              const std::vector<double>& hbars, const WKBOptions& opt,
                                              MaslovConvention mc) {
    auto scan = scan_endpoints(pr, t, opt);
    auto out = empty_fields(grid, hbars.size(), pr.N);
    for (int i = 0; i < grid.M; ++i) assemble_target(pr, scan, i, grid.point(i), hbars, opt, mc, out);
    return out;
}

void apply_pointwise(const std::vector<CMatrix>& U, CMatrix& field) {
    const auto M = static_cast<Eigen::Index>(U.size());
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < M; ++i) field.row(i) = (U[i] * field.row(i).transpose()).transpose();
}

void apply_pointwise_serial(const std::vector<CMatrix>& U, CMatrix& field) {
    const auto M = static_cast<Eigen::Index>(U.size());
    for (Eigen::Index i = 0; i < M; ++i) field.row(i) = (U[i] * field.row(i).transpose()).transpose();
}

namespace {

// exp(-i s A) for Hermitian A.
CMatrix expmi(const CMatrix& A, double s) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(A);
    CVector ph = (-I * s * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

bool close(const CMatrix& a, const CMatrix& b) { return (a - b).norm() <= 1e-12 * (1 + a.norm()); }

// Fraction of spectral weight in the top tenth of wavenumbers.
double tail_fraction(const CMatrix& field, Eigen::FFT<double>& fft) {
    const int M = static_cast<int>(field.rows());
    double tail = 0, total = 0;
    std::vector<cplx> in(M), out(M);
    for (Eigen::Index c = 0; c < field.cols(); ++c) {
        for (int i = 0; i < M; ++i) in[i] = field(i, c);
        fft.fwd(out, in);
        for (int j = 0; j < M; ++j) {
            const int k = j < M / 2 ? j : M - j;
            const double w = std::norm(out[j]);
            total += w;
            if (k > 0.45 * M) tail += w;
        }
    }
    return total > 0 ? tail / total : 0.0;
}

}  // namespace

GridWavefunction reference_solve(const WKBProblem& pr, const PeriodicGrid& grid, double hbar, double t, int steps) {
    if (!(hbar > 0) || steps < 1) throw std::invalid_argument("reference_solve: need hbar > 0 and steps >= 1");
    const int M = grid.M, N = pr.N;
    for (double q : {grid.lo, grid.lo + 0.37 * grid.length, grid.lo + 0.81 * grid.length}) {
        if (std::abs(pr.A[1](q)) > 1e-14 || std::abs(pr.A[2](q) - 0.5) > 1e-14 || std::abs(pr.A[3](q)) > 1e-14 ||
            std::abs(pr.A[4](q)) > 1e-14)
            throw std::invalid_argument("reference_solve: symbol must be p^2/2 + V(q)");
    }
    const CMatrix B1 = pr.H1(1, grid.lo) - pr.H1(0, grid.lo);
    for (double q : {grid.lo + 0.29 * grid.length, grid.lo + 0.66 * grid.length}) {
        CMatrix b0 = pr.H1(0, q);
        if (!close(pr.H1(1, q) - b0, B1) || !close(pr.H1(2, q) - b0, 2.0 * B1))
            throw std::invalid_argument("reference_solve: H1 must be B0(q) + p B1 with constant B1");
    }
    const double dt = t / steps;
    std::vector<CMatrix> half(M), kin(M);
    GridWavefunction w;
    w.q = grid.points();
    w.valid.assign(M, true);
    w.psi.resize(M, N);
    for (int i = 0; i < M; ++i) {
        const double q = w.q[i];
        half[i] = std::exp(-I * (dt * pr.A[0](q) / (2 * hbar))) * expmi(pr.H1(0, q), dt / 2);
        w.psi.row(i) = (std::exp(I * (pr.f(q) / hbar)) * pr.phi(q)).transpose();
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(B1);
    for (int j = 0; j < M; ++j) {
        const double k = 2 * std::numbers::pi * (j < M / 2 ? j : j - M) / grid.length;
        CVector ph = (-I * dt * hbar * k * es.eigenvalues().cast<cplx>()).array().exp();
        kin[j] = std::exp(-I * (dt * hbar * k * k / 2)) * es.eigenvectors() * ph.asDiagonal() *
                 es.eigenvectors().adjoint();
    }
    Eigen::FFT<double> fft;
    if (tail_fraction(w.psi, fft) > 1e-12)
        throw NumericalGuardError("reference_solve: initial data under-resolved on the grid");
    const double norm0 = w.psi.norm();
    std::vector<cplx> in(M), out(M);
    auto to_fourier = [&](CMatrix& f, bool forward) {
        for (int c = 0; c < N; ++c) {
            for (int i = 0; i < M; ++i) in[i] = f(i, c);
            if (forward)
                fft.fwd(out, in);
            else
                fft.inv(out, in);
            for (int i = 0; i < M; ++i) f(i, c) = out[i];
        }
    };
    for (int s = 0; s < steps; ++s) {
        apply_pointwise(half, w.psi);
        to_fourier(w.psi, true);
        apply_pointwise(kin, w.psi);
        to_fourier(w.psi, false);
        apply_pointwise(half, w.psi);
    }
    if (std::abs(w.psi.norm() - norm0) > 1e-10 * norm0) throw NumericalGuardError("reference_solve: norm drift");
    if (tail_fraction(w.psi, fft) > 1e-8)
        throw NumericalGuardError("reference_solve: solution under-resolved on the grid");
    return w;
}

double relative_l2_error(const GridWavefunction& approx, const GridWavefunction& ref) {
    if (approx.psi.rows() != ref.psi.rows() || approx.psi.cols() != ref.psi.cols())
        throw std::invalid_argument("relative_l2_error: grid mismatch");
    double num = 0, den = 0;
    for (Eigen::Index i = 0; i < ref.psi.rows(); ++i) {
        if (!approx.valid[i] || !ref.valid[i]) continue;
        num += (approx.psi.row(i) - ref.psi.row(i)).squaredNorm();
        den += ref.psi.row(i).squaredNorm();
    }
    if (den == 0) throw std::invalid_argument("relative_l2_error: reference vanishes on the valid set");
    return std::sqrt(num / den);
}

namespace {

double action_near(const WKBProblem& pr, double q, double t, double q0, const WKBOptions& opt) {
    auto bs = shoot(pr, q, t, opt);
    if (bs.empty()) throw std::invalid_argument("hj_residual: branch lost under perturbation");
    const WKBBranch* best = &bs.front();
    for (const auto& b : bs)
        if (std::abs(b.q0 - q0) < std::abs(best->q0 - q0)) best = &b;
    return best->S;
}

}  // namespace

double hj_residual(const WKBProblem& pr, double q, double t, double delta, const WKBOptions& opt) {
    double worst = 0;
    for (const auto& b : shoot(pr, q, t, opt)) {
        if (b.caustic) throw CausticError("hj_residual: caustic at the target");
        const double St = (action_near(pr, q, t + delta, b.q0, opt) - action_near(pr, q, t - delta, b.q0, opt)) /
                          (2 * delta);
        const double Sq = (action_near(pr, q + delta, t, b.q0, opt) - action_near(pr, q - delta, t, b.q0, opt)) /
                          (2 * delta);
        worst = std::max(worst, std::abs(St + pr.H0(Sq, q)));
    }
    return worst;
}

double fitted_order(const std::vector<ConvergenceRow>& rows) {
    if (rows.size() < 2) throw std::invalid_argument("fitted_order: need at least two rows");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : rows) {
        const double x = std::log(r.hbar), y = std::log(r.error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(rows.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void to_json(nlohmann::json& j, const ConvergenceStudy& s) {
    j = nlohmann::json::object();
    j["rows"] = nlohmann::json::array();
    for (const auto& r : s.rows) j["rows"].push_back({{"hbar", r.hbar}, {"L2_error", r.error}});
    j["order_estimate"] = s.order;
}

void write_csv(std::ostream& os, const GridWavefunction& w) {
    os << "q";
    for (Eigen::Index c = 0; c < w.psi.cols(); ++c) os << ",re" << c << ",im" << c;
    os << ",valid\n";
    os.precision(17);
    for (std::size_t i = 0; i < w.q.size(); ++i) {
        os << w.q[i];
        for (Eigen::Index c = 0; c < w.psi.cols(); ++c) {
            const auto i_ = static_cast<Eigen::Index>(i);
            os << ',' << w.psi(i_, c).real() << ',' << w.psi(i_, c).imag();
        }
        os << ',' << (w.valid[i] ? 1 : 0) << '\n';
    }
}

namespace {

double lagrangian_density(const std::vector<std::pair<int, double>>& w, const PhasePoint& x) {
    auto v = flow_velocity(w, x);
    double s = 0;
    for (int i = 0; i < x.sites(); ++i) s += x.p[i] * v.second[i];
    for (const auto& [k, c] : w) s -= c * hamiltonian(k, x);
    return s;
}

}  // namespace

double multitime_action(const PhasePoint& x0, const std::vector<FlowSegment>& path, double step,
                        const std::function<double(const PhasePoint&)>& f) {
    FlowOptions opt;
    opt.step = step;
    auto tr = flow(x0, path, opt);
    if (mt_el_residual(tr) > 1e-4) throw std::invalid_argument("multitime_action: orbit does not solve the flow");
    double S = f ? f(x0) : 0.0;
    for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
        const double h = tr.t[i + 1] - tr.t[i];
        const auto& w = tr.segments[tr.segment[i + 1]].weights;
        PhasePoint mid = rk4_step(w, tr.x[i], h / 2);
        S += h / 6 * (lagrangian_density(w, tr.x[i]) + 4 * lagrangian_density(w, mid) + lagrangian_density(w, tr.x[i + 1]));
    }
    return S;
}

double mt_el_residual(const Trajectory& tr) {
    double worst = 0;
    for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
        if (tr.segment[i] != tr.segment[i + 1] || tr.segment[i] != tr.segment[i - 1]) continue;
        const double h1 = tr.t[i + 1] - tr.t[i], h0 = tr.t[i] - tr.t[i - 1];
        if (std::abs(h1 - h0) > 1e-12 * h1) continue;
        auto v = flow_velocity(tr.segments[tr.segment[i]].weights, tr.x[i]);
        for (int a = 0; a < tr.x[i].sites(); ++a) {
            worst = std::max(worst, std::abs((tr.x[i + 1].p[a] - tr.x[i - 1].p[a]) / (2 * h1) - v.first[a]));
            worst = std::max(worst, std::abs((tr.x[i + 1].q[a] - tr.x[i - 1].q[a]) / (2 * h1) - v.second[a]));
        }
    }
    return worst;
}

namespace {

PhasePoint sheet_point(const PhasePoint& x0, int k, int l, double tk, double tl) {
    FlowOptions opt;
    opt.step = 1e-3;
    opt.monitored = 0;
    std::vector<FlowSegment> segs;
    if (tk != 0) segs.push_back(FlowSegment::single(k, tk));
    if (tl != 0) segs.push_back(FlowSegment::single(l, tl));
    PhasePoint x = x0;
    for (const auto& s : segs) {
        const double sign = s.duration < 0 ? -1.0 : 1.0;
        FlowSegment pos{{{s.weights.front().first, sign}}, std::abs(s.duration)};
        x = flow(x, {pos}, opt).x.back();
    }
    return x;
}

}  // namespace

double lagrangian_residual(const PhasePoint& x0, int k, int l, double Tk, double Tl, int samples, double h) {
    double worst = 0;
    for (int a = 0; a < samples; ++a)
        for (int b = 0; b < samples; ++b) {
            const double tk = Tk * (a + 0.5) / samples, tl = Tl * (b + 0.5) / samples;
            PhasePoint kp = sheet_point(x0, k, l, tk + h, tl), km = sheet_point(x0, k, l, tk - h, tl);
            PhasePoint lp = sheet_point(x0, k, l, tk, tl + h), lm = sheet_point(x0, k, l, tk, tl - h);
            double w = 0;
            for (int i = 0; i < x0.sites(); ++i) {
                const double Xp = (kp.p[i] - km.p[i]) / (2 * h), Xq = (kp.q[i] - km.q[i]) / (2 * h);
                const double Yp = (lp.p[i] - lm.p[i]) / (2 * h), Yq = (lp.q[i] - lm.q[i]) / (2 * h);
                w += Xp * Yq - Xq * Yp;
            }
            worst = std::max(worst, std::abs(w));
        }
    return worst;
}

}  // namespace cmslab
