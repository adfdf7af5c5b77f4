#pragma once

// ===========================================================================
// The rank-one separable model: <p2|V|p1> proportional to phi(p2) phi(p1),
// free dispersion E_k = k^2 / (2 mu).  The interaction strength can be fixed
// four ways; each way is only meaningful in particular regimes, which
// validate() enforces.
// ===========================================================================

#include "sepdyn/errors.hpp"
#include "sepdyn/formfactor.hpp"

namespace sepdyn {

enum class CouplingKind {
  lambda,     // Hamiltonian coupling strength (requires alpha > 1/2)
  g0,         // zero-energy amplitude t(0) (requires alpha <= 1/2)
  tail_pair,  // b2 of the large-|z| tail; b1 is fixed by (alpha, mu)
  cr,         // renormalized contact coupling C_R (unit form factor only)
};

struct Coupling {
  CouplingKind kind = CouplingKind::cr;
  double value = 0.0;

  static Coupling lambda(double v) { return {CouplingKind::lambda, v}; }
  static Coupling g0(double v) { return {CouplingKind::g0, v}; }
  static Coupling tail_b2(double v) { return {CouplingKind::tail_pair, v}; }
  static Coupling cr(double v) { return {CouplingKind::cr, v}; }
};

const char* coupling_kind_name(CouplingKind k);

struct SeparableModel {
  double mu = 0.5;  // reduced mass; the dispersion mass is m = 2 mu
  FormFactor phi = FormFactor::unit();
  Coupling coupling = Coupling::cr(1.0);

  double mass() const { return 2.0 * mu; }
  double energy_of(double k) const { return k * k / (2.0 * mu); }

  // Checks mu > 0 and that the coupling kind is compatible with the
  // regime selected by the form factor's tail exponent.
  void validate() const;
};

}  // namespace sepdyn
