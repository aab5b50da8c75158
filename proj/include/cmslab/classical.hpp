#pragma once

// Classical trigonometric Calogero-Moser-Sutherland system in real coordinates
// (p, q) with z = exp(i q).

#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cmslab/errors.hpp"
#include "cmslab/report.hpp"
#include "cmslab/spinspace.hpp"

namespace cmslab {

struct PhasePoint {
    std::vector<double> p;
    std::vector<double> q;

    int sites() const { return static_cast<int>(p.size()); }
    std::vector<cplx> z() const;
    cplx zi(int i) const { return std::polar(1.0, q[i]); }
    double min_separation() const;  // min |z_i - z_j|
};

/// Coordinates closer than the collision threshold.
class CollisionError : public NumericalGuardError {
public:
    using NumericalGuardError::NumericalGuardError;
};

inline constexpr double kCollisionThreshold = 1e-9;

struct LaxData {
    CMatrix L, P, M;
};

LaxData lax(const PhasePoint& x);

/// z_i z_j / (z_i - z_j)^2, equal to -1 / (4 sin^2((q_i - q_j)/2)) on the torus.
double pair_weight(const PhasePoint& x, int i, int j);

double hamiltonian(int k, const PhasePoint& x);

/// dH = sum dp_i dp_i + sum dq_i dq_i, where dq_i = i z_i dH/dz_i.
struct Gradient {
    std::vector<double> dp;
    std::vector<double> dq;
};

Gradient grad_hamiltonian(int k, const PhasePoint& x);

/// {f, g} = sum_j (df/dp_j dg/dq_j - dg/dp_j df/dq_j), i.e. {p_j, z_k} = i delta_jk z_k.
double poisson_bracket(const Gradient& f, const Gradient& g);

/// A segment of the multi-time flow generated by sum_k c_k H_k for the given duration.
struct FlowSegment {
    std::vector<std::pair<int, double>> weights;
    double duration = 0;

    static FlowSegment single(int k, double duration) { return {{{k, 1.0}}, duration}; }
};

struct FlowOptions {
    double step = 1e-3;
    double min_step = 1e-12;
    double halving_distance = 1e-3;
    int monitored = 3;  // record H_1..H_monitored at every grid point
};

struct Trajectory {
    std::vector<FlowSegment> segments;
    std::vector<double> t;           // cumulative flow time
    std::vector<int> segment;        // index of the segment that produced this point
    std::vector<PhasePoint> x;
    std::vector<std::vector<double>> H;

    std::size_t size() const { return t.size(); }
    double max_drift(int k) const;   // max |H_k(t) - H_k(t_0)| within segments
};

class FlowError : public NumericalGuardError {
public:
    FlowError(const std::string& what, Trajectory partial) : NumericalGuardError(what), partial_(std::move(partial)) {}
    const Trajectory& partial() const { return partial_; }

private:
    Trajectory partial_;
};

/// Velocity (dp/dt, dq/dt) of the combined flow.
std::pair<std::vector<double>, std::vector<double>> flow_velocity(const std::vector<std::pair<int, double>>& weights,
                                                                  const PhasePoint& x);
/// One classical RK4 step.
PhasePoint rk4_step(const std::vector<std::pair<int, double>>& weights, const PhasePoint& x, double h);

Trajectory flow(const PhasePoint& x0, const std::vector<FlowSegment>& segments, const FlowOptions& opt = {});

/// p = 0, z_k = exp(2 pi i k / n), k = 1..n.
PhasePoint freezing_point(int n);

/// F_i = d det(lambda + L) / dp_i and G_i = d det(lambda + L) / dq_i.
std::vector<cplx> generating_F(const PhasePoint& x, double lambda);
std::vector<cplx> generating_G(const PhasePoint& x, double lambda);

std::vector<Report> verify_fixed_point(int n, const std::vector<double>& lambdas, double tol);

void write_csv(std::ostream& os, const Trajectory& tr);

double phase_distance(const PhasePoint& a, const PhasePoint& b);  // angles compared mod 2 pi

}  // namespace cmslab
