#pragma once

// ===========================================================================
// Reduced scattering amplitude t(z) for the rank-one separable model, in all
// four parametrizations, plus the residual checks that certify the governing
// identities and the on-shell observables.
//
// The full kernel factorizes as <p2|T(z)|p1> = phi(p2) phi(p1) t(z); only
// the scalar t(z) is computed here.
// ===========================================================================

#include <optional>

#include "sepdyn/loops.hpp"

namespace sepdyn {

// A value plus a propagated quadrature error bound (zero when every
// ingredient was analytic up to rounding).
struct Amplitude {
  Complex value{0.0, 0.0};
  double error_bound = 0.0;
};

// Converts a tail_pair coupling (b2 stored; b1 fixed by alpha, mu) to the
// zero-energy amplitude: g0 = -b1^2 / (b2 + b1^2 M(0)).
// Throws SingularCouplingError when the denominator vanishes.
double g0_from_b(const SeparableModel& model);

// t(z) = (1/lambda - I(z))^{-1}; requires the hamiltonian regime.
Complex t_hamiltonian(const SeparableModel& model, Complex z);

// t(z) = g0 (1 - z g0 K(z))^{-1}; requires tail exponent <= 1/2.
Complex t_nonlocal(const SeparableModel& model, Complex z);

// t(z) = b1^2 / (-b2 + b1 (-z)^{1/2-alpha} - M(z) b1^2); nonlocal regime.
Complex n_of_z(const SeparableModel& model, Complex z);

// Leading-order contact amplitude [1/c_r - m^{3/2} sqrt(-z)/(4 pi)]^{-1}.
Complex t_eft_lo(double c_r, double m, Complex z);

// Dispatch on the model's coupling kind.
Complex t_of(const SeparableModel& model, Complex z);
Amplitude t_with_bound(const SeparableModel& model, Complex z);

// |t(z1) - t(z2) - (z2 - z1) t(z2) t(z1) J(z1,z2)| / max(|t1|, |t2|).
// If budget is non-null it receives the propagated error allowance for the
// residual (what "zero" looks like given the quadrature bounds involved).
double hilbert_residual(const SeparableModel& model, Complex z1, Complex z2,
                        double* budget = nullptr);

// |central-difference dt/dz + t(z)^2 D(z)| / |t(z)^2 D(z)|.
double ode_residual(const SeparableModel& model, Complex z, double h);

// Same residual at h and h/2 with the Richardson ratio; `asymptotic` is
// true when the ratio shows the expected O(h^2) contraction or the refined
// residual has already reached the quadrature noise floor.
struct OdeCheck {
  double residual = 0.0;
  double refined_residual = 0.0;
  double richardson_ratio = 0.0;
  double noise_floor = 0.0;
  bool asymptotic = false;
};
OdeCheck ode_residual_checked(const SeparableModel& model, Complex z,
                              double h);

// On-shell inverse-amplitude combination -4 pi/(m T(E_p + i0)) + i p for a
// unit-form-factor model.  Its imaginary part must cancel by unitarity;
// the real part equals p cot(delta).
Complex ere_function(const SeparableModel& model, double p);

// delta(p) = atan(p / Re ere) in (-pi/2, pi/2].
double phase_shift(const SeparableModel& model, double p);

// -16 pi^2/(m^3 c_r^2) = -1/(m a^2) when c_r > 0; no bound state otherwise.
std::optional<double> bound_state_energy(double c_r, double m);

// Locates a real pole of t on [e_min, e_max] (negative axis) by geometric
// scan plus bisection of the inverse-amplitude denominator.
std::optional<double> find_pole(const SeparableModel& model,
                                double e_min = -1e8, double e_max = -1e-10);

}  // namespace sepdyn
