#pragma once

// R-matrix identities: quantum and classical Yang-Baxter equations, the
// semiclassical expansion R = 1 + i hbar r + hbar^2 s + ..., and the unitarity
// proposition (1/2) r^2 + s = (1/4) d^2 f / d hbar^2.

#include <functional>
#include <vector>

#include "cmslab/errors.hpp"
#include "cmslab/report.hpp"
#include "cmslab/spinspace.hpp"

namespace cmslab {

struct RMatrixFamily {
    int N = 2;
    std::function<CMatrix(double u, double hbar)> R;    // N^2 x N^2
    std::function<CMatrix(double u)> r, s;               // declared expansion terms, may be empty

    CMatrix operator()(double u, double hbar) const;
};

/// R(u) = I + (hbar / u) P, r = -i P / u, s = 0.
RMatrixFamily yang_r(int N);

/// Flip operator on C^N x C^N.
CMatrix flip(int N);
/// An operator on factors (i, j) of C^N x C^N x C^N, i != j in {1, 2, 3}; factor 1 varies fastest.
CMatrix embed(const CMatrix& X, int i, int j, int N);

/// || R12(u) R13(u+v) R23(v) - R23(v) R13(u+v) R12(u) ||_F
double qybe_residual(const RMatrixFamily& fam, double u, double v, double hbar);

class ExtrapolationError : public NumericalGuardError {
public:
    using NumericalGuardError::NumericalGuardError;
};

struct Expansion {
    CMatrix r, s;
};

/// r = (1/i) dR/dhbar and s = (1/2) d^2R/dhbar^2 at hbar = 0 by Richardson-extrapolated centred differences
/// on the given decreasing step list.
Expansion semiclassical_extract(const RMatrixFamily& fam, double u, const std::vector<double>& hbars = {0.2, 0.1, 0.05});

/// || [r12(u), r13(u+v)] + [r12(u), r23(v)] + [r13(u+v), r23(v)] ||_F
double cybe_residual(const std::function<CMatrix(double)>& r, int N, double u, double v);
/// CYBE with r extracted from the family.
double cybe_residual(const RMatrixFamily& fam, double u, double v);

/// The scalar f with R12(u) R21(-u) = f I, its defect, and the symmetry residual.
struct UnitarityData {
    cplx f;
    double defect;     // || R12(u) R21(-u) - f I ||_F
    double symmetry;   // || R12(u, hbar) - R21(-u, -hbar) ||_F
};
UnitarityData unitarity(const RMatrixFamily& fam, double u, double hbar);

/// Checks unitarity and symmetry first, then that (1/2) r^2 + s = (1/4) f''(0) I at every sample.
Report unitarity_proposition_check(const RMatrixFamily& fam, const std::vector<double>& us, double tol = 1e-12);

}  // namespace cmslab
