#pragma once

// Semiclassical (WKB) asymptotics for a matrix Schrodinger equation in one degree
// of freedom, i hbar d psi/dt = (H0(p, q) + hbar H1(p, q)) psi, plus a split-step
// reference solver and multi-time action checks on Calogero-Moser data.

#include <array>
#include <functional>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "cmslab/classical.hpp"
#include "cmslab/errors.hpp"
#include "cmslab/spinspace.hpp"

namespace cmslab {

/// A smooth real function together with its first two derivatives.
struct Smooth {
    std::function<double(double)> f, df, d2f;

    static Smooth constant(double c);
    static Smooth linear(double a, double b = 0);   // a q + b
    static Smooth cosine(double amp, double freq = 1, double phase = 0);  // amp cos(freq q + phase)
    static Smooth gaussian_bump(double amp, double width);  // amp exp(-q^2 / (2 width^2))
    double operator()(double q) const { return f(q); }
};

class CausticError : public NumericalGuardError {
public:
    using NumericalGuardError::NumericalGuardError;
};

struct WKBProblem {
    std::array<Smooth, 5> A;   // H0 = sum_k A_k(q) p^k
    std::function<CMatrix(double p, double q)> H1;
    Smooth f;                  // initial phase
    std::function<CVector(double q)> phi;   // initial profile
    int N = 1;
    double support_lo = -8, support_hi = 8;   // phi negligible outside

    double H0(double p, double q) const;
    double dH0_dp(double p, double q) const;
    double dH0_dq(double p, double q) const;
    double d2H0_dp2(double p, double q) const;
    double d2H0_dpdq(double p, double q) const;
    double d2H0_dq2(double p, double q) const;

    /// H0 = p^2/2 + V(q).
    static WKBProblem kinetic(Smooth V, std::function<CMatrix(double, double)> H1, Smooth f,
                              std::function<CVector(double)> phi, int N);
};

struct WKBOptions {
    int steps = 200;           // RK4 steps per trajectory (even)
    int scan_points = 1601;
    double root_tol = 1e-13;
    double caustic_tol = 1e-6;
};

/// Trajectory from (f'(q0), q0) with the Jacobi field (dq, dp) = d/dq0.
struct WKBBranch {
    double q0 = 0;
    std::vector<double> tau, p, q, dq, dp;
    double S = 0;              // Hamilton-Jacobi action including f(q0)
    double D = 0;              // |dq0/dq|^(1/2)
    int mu = 0;                // sign changes of the Jacobi field on (0, t]
    CVector Psi;
    bool caustic = false;

    double jacobian() const { return dq.back(); }
    double endpoint() const { return q.back(); }
};

/// Classical trajectory of H0 with its Jacobi field; no action or transport yet.
WKBBranch integrate_branch(const WKBProblem& pr, double q0, double t, int steps);

/// Endpoint map q0 -> q(t; q0) sampled on the support.
struct EndpointScan {
    double t = 0;
    std::vector<double> q0, q;
};

EndpointScan scan_endpoints(const WKBProblem& pr, double t, const WKBOptions& opt = {});

/// All branches ending at q, each with action, amplitude, Maslov index and transported vector.
std::vector<WKBBranch> shoot(const WKBProblem& pr, const EndpointScan& scan, double q, const WKBOptions& opt = {});
std::vector<WKBBranch> shoot(const WKBProblem& pr, double q, double t, const WKBOptions& opt = {});

/// S = int (p dq/dtau - H0) dtau + f(q0), Simpson's rule on the branch grid.
double hj_action(const WKBProblem& pr, const WKBBranch& b);
/// Sets D and mu from the Jacobi field; flags caustics.
void amplitude_and_maslov(WKBBranch& b, double caustic_tol = 1e-6);
/// d Psi / dt = -i H1(p(t), q(t)) Psi with Psi(0) = phi(q0), RK4 on the branch grid.
CVector transport_vector(const WKBProblem& pr, const WKBBranch& b);

/// Phase attached to a branch with Maslov index mu.
enum class MaslovConvention {
    FocalPoints,     // exp(-i pi mu / 2): a quarter-period loss per focal point
    QuarterPlus,     // exp(+i pi mu / 4) taken literally
};

struct PeriodicGrid {
    double lo = -20, length = 40;
    int M = 4096;
    double dq() const { return length / M; }
    double point(int i) const { return lo + i * dq(); }
    std::vector<double> points() const;
};

struct GridWavefunction {
    std::vector<double> q;
    CMatrix psi;               // M x N
    std::vector<bool> valid;   // false at caustic targets
};

/// Semiclassical wavefunction on the grid for each hbar; targets are processed in parallel.
std::vector<GridWavefunction> assemble(const WKBProblem& pr, const PeriodicGrid& grid, double t,
                                       const std::vector<double>& hbars, const WKBOptions& opt = {},
                                       MaslovConvention mc = MaslovConvention::FocalPoints);
std::vector<GridWavefunction> assemble_serial(const WKBProblem& pr, const PeriodicGrid& grid, double t,
                                              const std::vector<double>& hbars, const WKBOptions& opt = {},
                                              MaslovConvention mc = MaslovConvention::FocalPoints);

/// Strang split-step Fourier solution for H0 = p^2/2 + V and H1 = B0(q) + p B1 with constant B1.
GridWavefunction reference_solve(const WKBProblem& pr, const PeriodicGrid& grid, double hbar, double t, int steps);

/// Pointwise out_i = U_i in_i (rows of an M x N field); serial twin for testing.
void apply_pointwise(const std::vector<CMatrix>& U, CMatrix& field);
void apply_pointwise_serial(const std::vector<CMatrix>& U, CMatrix& field);

/// Relative discrete L2 error over valid points.
double relative_l2_error(const GridWavefunction& approx, const GridWavefunction& ref);

/// |dS/dt + H0(dS/dq, q)| by centred differences, maximized over branches at q.
double hj_residual(const WKBProblem& pr, double q, double t, double delta, const WKBOptions& opt = {});

struct ConvergenceRow {
    double hbar, error;
};
struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    double order = 0;          // least-squares slope of log error against log hbar
};
double fitted_order(const std::vector<ConvergenceRow>& rows);
void to_json(nlohmann::json& j, const ConvergenceStudy& s);

void write_csv(std::ostream& os, const GridWavefunction& w);

// Multi-time action on Calogero-Moser data

/// int (sum_i p_i dq_i - sum_k H_k dt_k) + f(q(0)) along the multi-time orbit through x0; the path in
/// time space is the concatenation of the segments.
double multitime_action(const PhasePoint& x0, const std::vector<FlowSegment>& path, double step,
                        const std::function<double(const PhasePoint&)>& f = {});
/// max |dx/dtau - X(x)| over interior grid points of a stored trajectory.
double mt_el_residual(const Trajectory& tr);
/// max |omega(dx/dt_k, dx/dt_l)| at sample points of the (t_k, t_l) sheet, tangents by centred differences.
double lagrangian_residual(const PhasePoint& x0, int k, int l, double Tk, double Tl, int samples, double h);

}  // namespace cmslab
