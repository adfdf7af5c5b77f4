#pragma once

// Large-|z| tail extraction for the reduced amplitude and the coefficient
// calculus connecting the frequency-domain tail
//     t(z) ~ b1 (-z)^(alpha-1/2) + b2 (-z)^(2 alpha - 1)
// with the time-domain kernel
//     f(tau) = a1 tau^(-alpha-1/2) + a2 tau^(-2 alpha) [+ a3 tau^(1/2-3 alpha)].

#include <optional>
#include <utility>
#include <vector>

#include "sepdyn/numerics.hpp"
#include "sepdyn/tmatrix.hpp"

namespace sepdyn {

// Time-domain kernel coefficients for a given tail exponent alpha.
struct InteractionKernel {
  double alpha = 0.0;
  Complex a1{0.0, 0.0};
  Complex a2{0.0, 0.0};
  std::optional<Complex> a3;  // next-order coefficient, when tracked

  void validate() const;  // requires -1/2 < alpha < 1/2 and finite entries

  // Spacing of successive tail exponents; also the remainder exponent of
  // truncating the two-term series.
  double epsilon_exponent() const { return 0.5 - alpha; }
  // Exponent of the subleading-to-leading ratio in the time domain.
  double beta_exponent() const { return 1.0 - 2.0 * alpha; }
};

// ---------------------------------------------------------------------------
// power-basis least squares
// ---------------------------------------------------------------------------

struct TailFit {
  double b1 = 0.0;
  double b2 = 0.0;
  double residual = 0.0;  // rms relative misfit over the samples
};

struct TailFit3 {
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  double residual = 0.0;
};

std::vector<double> log_spaced(double lo, double hi, int n);

// Relative-weighted least squares of y ~ c1 x^e1 + c2 x^e2 (+ c3 x^e3).
TailFit fit_two_powers(const std::vector<double>& x,
                       const std::vector<double>& y, double e1, double e2);
TailFit3 fit_three_powers(const std::vector<double>& x,
                          const std::vector<double>& y, double e1, double e2,
                          double e3);

// Slope of log|y| against log x; the decay exponent of a power-law table.
double log_log_slope(const std::vector<double>& x,
                     const std::vector<double>& y);

// Sample t(z) on the negative real axis at log-spaced -z in [neg_z_lo,
// neg_z_hi] and fit the regime's tail basis:
//   nonlocal regime    : exponents (alpha - 1/2, 2 alpha - 1) -> (b1, b2)
//   hamiltonian regime : exponents (0, -1/2) -> (coupling constant, slope)
// Marginal tails are logarithmic and not representable in this basis.
// A relative rms misfit above max_residual throws AccuracyError.
TailFit tail_fit(const SeparableModel& model, int n_points = 40,
                 double neg_z_lo = 1e2, double neg_z_hi = 1e6,
                 double max_residual = 1e-2);
TailFit3 tail_fit3(const SeparableModel& model, int n_points = 40,
                   double neg_z_lo = 1e2, double neg_z_hi = 1e6,
                   double max_residual = 1e-2);

// ---------------------------------------------------------------------------
// coefficient maps between the two domains
// ---------------------------------------------------------------------------

// a1 = -i b1 Gamma^(-1)(1/2-alpha) e^{i(1/4 - alpha/2) pi}
// a2 =    b2 Gamma^(-1)(1-2alpha)  e^{-i alpha pi}
std::pair<Complex, Complex> a_from_b(double b1, double b2, double alpha);
std::pair<Complex, Complex> b_from_a(Complex a1, Complex a2, double alpha);

// Third-order coefficient induced by the first two:
// a3 = (a2^2/a1) Gamma^2(1-2alpha) / (Gamma(1/2-alpha) Gamma(3/2-3alpha)).
Complex a3_of(Complex a1, Complex a2, double alpha);
Complex b3_from_a3(Complex a3, double alpha);

// ---------------------------------------------------------------------------
// Laplace bridge
// ---------------------------------------------------------------------------

// Numeric i * Int_0^inf e^{i z tau} f(tau) dtau for Im z > 0, head handled
// by a power series around tau = 0 and the tail by adaptive quadrature.
Complex laplace_numeric(const InteractionKernel& kernel, Complex z);

// The closed-form target b1 (-z)^(alpha-1/2) + b2 (-z)^(2 alpha-1).
Complex tail_closed_form(double b1, double b2, double alpha, Complex z);

// Relative residual between the numeric transform of the kernel and the
// closed form reconstructed from its coefficients.
double laplace_check(const InteractionKernel& kernel, Complex z);

// ---------------------------------------------------------------------------
// marginal (alpha = 1/2) logarithmic tail
// ---------------------------------------------------------------------------

double marginal_b1(double mu);  // -2 pi^2 / mu

// b1/ln(-z) + b2/ln^2(-z); requires |z| > 1 so the log stays away from 0.
Complex marginal_kernel_f1(double b1, double b2, Complex z);

}  // namespace sepdyn
