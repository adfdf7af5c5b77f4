#pragma once

// Shared numerical kernels: branch-correct complex powers, the complex gamma
// function, adaptive Gauss-Kronrod quadrature on [0, inf), and weighted node
// grids for oscillatory line integrals along a horizontal contour in the
// upper half of the complex energy plane.

#include <complex>
#include <functional>
#include <vector>

#include "sepdyn/errors.hpp"

namespace sepdyn {

using Complex = std::complex<double>;

// ===========================================================================
// quadrature controls
// ===========================================================================

struct QuadratureSpec {
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;
  int max_subdiv = 4000;
  // Radial integrals: momentum where the 1/k tail substitution takes over.
  // Line integrals: minimum half-extent of the finely panelled core region.
  double tail_start = 40.0;
  // Line integrals: core panel width; 0 selects pi / max(t, t0, 1).
  double panel_width = 0.0;
  // Oscillatory wing: half-periods kept at full weight, then binomially
  // tapered half-periods (iterated averaging of the partial sums).
  int plain_halfperiods = 8;
  int taper_halfperiods = 24;

  void validate() const;  // throws DomainError on out-of-range fields
};

struct IntegralResult {
  Complex value{0.0, 0.0};
  double error_bound = 0.0;
};

// ===========================================================================
// elementary kernels
// ===========================================================================

// w^s on the principal branch: log with arg in (-pi, pi], cut along the
// negative real axis of w.  Signed zeros select the side of the cut, so for
// energies on the scattering cut pass w = -(E + i0) and the square root
// comes out as -i sqrt(E).  w == 0: returns 0 for s > 0, 1 for s == 0,
// throws DomainError for s < 0.
Complex principal_power(Complex w, double s);

// Gamma(s) by the Lanczos series (g = 7, 9 coefficients), reflected to
// Re s < 1/2.  Good to ~1e-12 relative for |s| <= 10.  Non-positive integer
// s throws DomainError.
Complex complex_gamma(Complex s);

// cos(pi a) evaluated so half-integer a gives an exact zero.
double cos_pi(double a);

// ===========================================================================
// Gauss rules
// ===========================================================================

// Gauss-Legendre nodes/weights on [-1, 1], cached per order.
struct GaussRule {
  std::vector<double> x, w;
};
const GaussRule& gauss_legendre(int n);

// ===========================================================================
// semi-infinite radial integrals
// ===========================================================================

enum class Measure {
  plain,     // integral of f(k) dk as given
  radial3d,  // folds the angular factor 1/(2 pi^2); caller supplies k^2 f(k)
};

// Integral of f over [0, inf).  Adaptive Gauss-Kronrod 7/15 on
// [0, tail_start], then the substitution u = 1/k compresses the tail onto
// (0, 1/tail_start] where the same adaptive rule finishes the job.  The
// returned error_bound is the accumulated rule estimate and is intended to
// overestimate the true error.  Throws AccuracyError (carrying the best
// estimate and its bound) if the subdivision budget is exhausted.
IntegralResult integrate_semiinf(const std::function<Complex(double)>& f,
                                 const QuadratureSpec& spec = {},
                                 Measure measure = Measure::plain);

// Adaptive Gauss-Kronrod 7/15 on a finite interval (same error contract).
IntegralResult integrate_finite(const std::function<Complex(double)>& f,
                                double a, double b,
                                const QuadratureSpec& spec = {});

// ===========================================================================
// oscillatory line integrals along z = x + i y
// ===========================================================================

// Height of the evolution contour above the real axis.
double contour_height(double t, double t0);

// Flattened node/weight grid for i/(2 pi) * Int dx F(x + i y).  The core
// |x| <= max(tail_start, x_core) is panelled at the requested width; beyond
// it the envelope zone uses geometrically growing panels and, once the
// half-period pi/(t - t0) dominates, whole half-period panels whose weights
// taper off binomially so the truncated oscillatory tail cancels.  For
// t == t0 the wings are compressed by u = 1/x instead (integrand must decay
// faster than 1/x).
struct ContourGrid {
  double y = 1.0;
  std::vector<double> x;
  std::vector<double> w;
};

ContourGrid make_contour_grid(double t, double t0,
                              const QuadratureSpec& spec = {},
                              double x_core = 0.0, double y_override = 0.0);

// i/(2 pi) * Int dx F(z(x)), z = x + i y, with y picked by contour_height
// unless overridden.  The integrand receives the full complex z.  The error
// bound combines per-panel rule estimates with a power-law fit of the
// integrand envelope at the truncation edge.
IntegralResult contour_line_integral(const std::function<Complex(Complex)>& F,
                                     double t, double t0,
                                     const QuadratureSpec& spec = {},
                                     double x_core = 0.0,
                                     double y_override = 0.0);

}  // namespace sepdyn
