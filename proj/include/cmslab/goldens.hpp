#pragma once

// The explicitly displayed Hamiltonians, transcribed term by term.

#include "cmslab/heckerep.hpp"

namespace cmslab::goldens {

/// 1/2 sum p_i^2 - 1/2 sum_{i != j} z_i z_j / (z_i - z_j)^2 (1 + hbar P_ij)
RestrictedOperator displayed_H2(int n);

/// 1/3 sum p_i^3 - sum_{i != j} z_i z_j (1 + hbar P_ij) / (z_i - z_j)^2 p_i
///   - hbar/3 sum_{i,j,k distinct} z_i z_j z_k P_jk P_ij / ((z_i - z_j)(z_j - z_k)(z_k - z_i))
RestrictedOperator displayed_H3(int n);

/// hbar^1 coefficients H^(1)_2 and H^(1)_3 as functions of (p, z).
std::map<SiteMap, RationalFunction> displayed_H1_2(int n);
std::map<SiteMap, RationalFunction> displayed_H1_3(int n);

}  // namespace cmslab::goldens
