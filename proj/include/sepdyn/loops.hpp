#pragma once

// ===========================================================================
// Radial loop integrals over the measure (1/2 pi^2) \int_0^inf dk k^2 (...),
// with dispersion E_k = k^2 / (2 mu).  Each operation prefers a closed form
// from the per-kind catalogue and falls back to adaptive quadrature with a
// tracked error bound.
//
// Branch convention: energies z live on the cut plane with the cut along
// [0, inf).  A z with Im z == +0.0 and Re z > 0 is the upper-edge limit
// E + i0 (principal value plus the half-residue term); Im z == -0.0 selects
// the lower edge.
// ===========================================================================

#include "sepdyn/model.hpp"
#include "sepdyn/numerics.hpp"

namespace sepdyn {

enum class LoopMethod { analytic, quadrature };

struct LoopResult {
  Complex value{0.0, 0.0};
  double error_bound = 0.0;
  LoopMethod method = LoopMethod::quadrature;
};

// Leading tail coefficient of the weighted kernel:
//   b1 = -4 pi cos(alpha pi) (2 mu)^{alpha - 3/2}.
// Requires -1/2 < alpha <= 1/2; vanishes at alpha = 1/2.
double b1_of_alpha(double alpha, double mu);

// \int |phi|^2 / (z - E_k).  Requires tail exponent > 1/2 (UV-convergent).
LoopResult loop_I(const SeparableModel& model, Complex z);

// \int |phi|^2 / ((z - E_k) E_k).  Requires tail exponent > -1/2; for
// pure_power additionally alpha < 1/2 (infrared convergence).
LoopResult weighted_K(const SeparableModel& model, Complex z);

// \int (|phi|^2 - k^{-2 alpha}) / (s - E_k), the tail-subtracted kernel.
// Requires the nonlocal regime (-1/2 < alpha < 1/2).
LoopResult subtracted_M(const SeparableModel& model, Complex s);

// \int |phi|^2 / ((z1 - E_k)(z2 - E_k)), symmetric in its arguments.
// z1 == z2 is rejected (use second_moment_D).
LoopResult resolvent_J(const SeparableModel& model, Complex z1, Complex z2);

// \int |phi|^2 / (z - E_k)^2.  Strictly off the cut (the double pole has
// no principal-value limit).
LoopResult second_moment_D(const SeparableModel& model, Complex z);

}  // namespace sepdyn
