#pragma once

// Cutoff-regularized contact interaction: bare-coupling flow C0(Lambda),
// regulated amplitudes in two algebraically equivalent forms, and sweeps
// demonstrating convergence to the contact amplitude as Lambda -> infinity.

#include <vector>

#include "sepdyn/numerics.hpp"

namespace sepdyn {

enum class CutoffKind { sharp, gaussian, dipole };

const char* cutoff_kind_name(CutoffKind kind);

// Momentum-space regulator profile f(p/Lambda), f(0) = 1:
//   sharp    : 1 for p <= Lambda, 0 beyond
//   gaussian : exp(-p^2 / (2 Lambda^2))
//   dipole   : Lambda^2 / (p^2 + Lambda^2)
struct CutoffScheme {
  CutoffKind kind = CutoffKind::sharp;
  double lambda = 1.0;  // cutoff momentum, > 0

  double regulator(double p) const;
  void validate() const;
};

// Subtraction integral theta(Lambda) = (m / 2 pi^2) * Int_0^inf f^2(k) dk.
// Linearly divergent in Lambda; closed form for all three regulators.
double theta_integral(const CutoffScheme& scheme, double m);

// Bare coupling from the renormalized one: C0 = (1/C_R - theta)^(-1).
// Throws SingularCouplingError when the subtraction cancels 1/C_R exactly.
double c0_from_cr(double c_r, const CutoffScheme& scheme, double m);

// Reduced regulated amplitude at cutoff Lambda, two equivalent routes:
//   bare form        : (1/C0  - Int k^2 f^2 / (z - E_k))^(-1)
//   renormalized form: (1/C_R - z Int k^2 f^2 / ((z - E_k) E_k))^(-1)
// Both require z off the scattering cut.
Complex t_regularized_c0(const CutoffScheme& scheme, double c0, double m,
                         Complex z);
Complex t_regularized_cr(const CutoffScheme& scheme, double c_r, double m,
                         Complex z);

struct SweepRow {
  double lambda = 0.0;
  Complex t{0.0, 0.0};   // regulated amplitude at this cutoff
  double abs_err = 0.0;  // |T_Lambda - T_infinity|
  double rel_err = 0.0;
  bool pole = false;     // amplitude pole hit at this cutoff; t invalid
};

// Evaluate the regulated amplitude across an increasing cutoff list and
// compare against the contact limit. Rows whose evaluation hits a pole are
// flagged rather than aborting the sweep.
std::vector<SweepRow> cutoff_sweep(double c_r, double m, Complex z,
                                   const std::vector<double>& lambdas,
                                   CutoffKind kind = CutoffKind::sharp);

// Least-squares exponent p of |T_Lambda - T_inf| ~ Lambda^(-p) over the
// sweep's clean rows. Needs at least two usable rows.
double sweep_decay_exponent(const std::vector<SweepRow>& rows);

// a = m C_R / (4 pi) and its inverse; negative values pass through.
double scattering_length(double c_r, double m);
double cr_from_a(double a, double m);

}  // namespace sepdyn
