#pragma once

// Hybrid classical-quantum dynamics: a spin state carried along a classical
// trajectory by the first-order spin Hamiltonians H^(1)_k.

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "cmslab/classical.hpp"
#include "cmslab/errors.hpp"
#include "cmslab/report.hpp"
#include "cmslab/spinspace.hpp"

namespace cmslab {

/// H^(1)_k at x on (C^N)^n as a lazy permutation sum. k = 1..3 use closed forms,
/// k = 4 uses the symbolic split (n <= 4).
SpinOperator quantum_hamiltonian(int k, const PhasePoint& x, int N);

/// sum_k c_k H^(1)_k(x).
SpinOperator quantum_field(const std::vector<std::pair<int, double>>& weights, const PhasePoint& x, int N);

/// An operator-valued function on phase space.
using OperatorField = std::function<SpinOperator(const PhasePoint&)>;
using ScalarField = std::function<double(const PhasePoint&)>;

struct TransportOptions {
    double norm_guard = 1e-6;
    bool track_propagator = false;   // also integrate dV/dt = -i H V
};

struct TransportResult {
    Trajectory trajectory;
    std::vector<SpinVector> psi;     // one per trajectory point
    std::optional<CMatrix> V;        // psi(T) = V psi(0)
    double max_norm_drift = 0;
    const SpinVector& final_state() const { return psi.back(); }
};

/// Solves d psi / dt = -i H(x(t)) psi by RK4 coupled to the classical RK4 stages.
TransportResult transport(const Trajectory& tr, const SpinVector& psi0, const TransportOptions& opt = {});
TransportResult transport(const PhasePoint& x0, const SpinVector& psi0, const std::vector<FlowSegment>& segments,
                          double step, const TransportOptions& opt = {});

void write_csv(std::ostream& os, const TransportResult& r);

/// Propagator V(T) with dV/dt = -i H(x(t)) V, H optionally shifted by z(x) times the identity.
CMatrix propagator(const Trajectory& tr, int N, const ScalarField& shift = {});

/// U(T) = V(T)^dagger, i.e. dU/dt = U i H(x(t)): later times act on the right.
CMatrix heisenberg_propagator(const Trajectory& tr, int N);

/// || d_k H_l - d_l H_k + i [H_k, H_l] || at x0 by centred differences along the classical flows.
double zero_curvature_residual(const PhasePoint& x0, int k, int l, int N, double h);

/// || psi(t_k then t_l) - psi(t_l then t_k) || together with the classical endpoint gap.
struct OrderDiscrepancy {
    double spin = 0;
    double classical = 0;
};
OrderDiscrepancy order_of_flows(const PhasePoint& x0, const SpinVector& psi0, int k, double tk, int l, double tl,
                                double step);

/// s(t) at x0: U s(x(t)) U^-1 with U the Heisenberg propagator of the flow from x0.
CMatrix heisenberg_evolve(const OperatorField& s, const PhasePoint& x0, const std::vector<FlowSegment>& segments,
                          int N, double step);

/// Density supported on a single phase-space point.
struct PointDensity {
    PhasePoint x;
    CMatrix rho;
};

/// Moves the support along the flow and integrates d rho / dt = -i [H(x(t)), rho].
PointDensity density_evolve(const PointDensity& rho0, const std::vector<FlowSegment>& segments, int N, double step);

cplx expectation_value(const PointDensity& rho, const OperatorField& s);

/// Checks w = exp(-i theta) v for the shifted Hamiltonian H + z(x) with theta = int z(x(t)) dt.
Report gauge_shift_check(const std::string& scenario, const PhasePoint& x0, const SpinVector& psi0,
                         const std::vector<FlowSegment>& segments, const ScalarField& z, double step, double tol);

/// U(T) along a closed orbit; throws std::invalid_argument when x(T) != x(0).
CMatrix monodromy(const Trajectory& orbit, int N, double closure_tol = 1e-8);

/// Haldane-Shastry Hamiltonians M_k = H^(1)_k at the freezing point.
SpinOperator haldane_shastry(int k, int n, int N);

/// Cyclic site shift i -> i + 1 mod n.
SiteMap cyclic_shift(int n);

}  // namespace cmslab
