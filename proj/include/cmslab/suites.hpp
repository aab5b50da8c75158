#pragma once

// Verification suites shared by the command-line tool and the acceptance binary.
// Every entry is a Report; randomized points come from the given seed.

#include <random>
#include <string>
#include <vector>

#include "cmslab/classical.hpp"
#include "cmslab/report.hpp"
#include "cmslab/wkb.hpp"

namespace cmslab::suites {

/// Collision-free random point: p uniform in [-1, 1], q_i jittered around 2 pi i / n.
PhasePoint random_point(int n, std::mt19937_64& rng);

/// Hecke relations for both kinds, plus the cancellation identity for n >= 3. Exact, n <= 4.
std::vector<Report> hecke(int n);

/// Restricted H_2 (n = 2, 3) and H_3 (n = 3) against the displayed formulas.
std::vector<Report> goldens();

/// Leading order of H_k is (1/k) tr L^k for k <= 3, n <= 3, and f_w = 0 for the generating product, n <= 4.
std::vector<Report> unity();

/// Generating-function derivatives and stationarity of the flow at the freezing point.
std::vector<Report> freezing(int n, double tol, double horizon = 10);

/// [M_2, M_3] = 0 and the pair-coupling form of M_2.
std::vector<Report> haldane_shastry(int n, int N, double tol);

/// Zero-curvature plateau at random points and order-of-flows transport discrepancy.
std::vector<Report> compatibility(int n, int N, unsigned long seed, int points, double step);

/// Gauge shift, density/Heisenberg duality and monodromy unitarity.
std::vector<Report> evolution_laws(unsigned long seed, int pairs, double step);

/// Named WKB problems: "free-gaussian" and "cosine".
WKBProblem wkb_case(const std::string& name);
inline const PeriodicGrid kWKBGrid{-8 * 3.14159265358979323846, 16 * 3.14159265358979323846, 4096};

/// Error of the assembled asymptotic solution against the split-step reference for each hbar.
ConvergenceStudy wkb_convergence(const WKBProblem& pr, const std::vector<double>& hbars, double t,
                                 int reference_steps = 1000);

/// Convergence order for both cases, Hamilton-Jacobi residual and multi-time path independence.
std::vector<Report> wkb(const std::vector<double>& hbars, double min_order);

/// QYBE and CYBE on the sample grid, the unitarity proposition and their negative controls.
std::vector<Report> rmatrix(int N, double tol);

}  // namespace cmslab::suites
