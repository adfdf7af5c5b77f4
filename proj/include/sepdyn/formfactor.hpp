#pragma once

// ===========================================================================
// Radial form factors phi(p) with a declared power-law tail phi ~ p^{-alpha}.
// The tail exponent alpha controls which dynamical regime the rank-one
// interaction falls into, so it is stored explicitly rather than inferred.
// ===========================================================================

#include <string>

namespace sepdyn {

// Dynamical regime selected by the ultraviolet tail exponent.
enum class Regime {
  hamiltonian,   // alpha > 1/2
  log_marginal,  // alpha = 1/2
  nonlocal,      // -1/2 < alpha < 1/2
};

enum class FormFactorKind { unit, pure_power, regulated_power, yamaguchi };

// Classify a tail exponent; throws DomainError for alpha <= -1/2.
Regime regime_of(double alpha);

const char* regime_name(Regime r);
const char* form_factor_kind_name(FormFactorKind k);

// Immutable value type.  Construction validates the parameters once;
// evaluation is then a pure function of p.
class FormFactor {
 public:
  // phi(p) = 1, alpha = 0.
  static FormFactor unit();
  // phi(p) = p^{-alpha}; singular at p = 0 when alpha > 0.
  static FormFactor pure_power(double alpha);
  // phi(p) = (p^2 + beta^2)^{-alpha/2}: smooth, same tail as pure_power.
  static FormFactor regulated_power(double alpha, double beta);
  // phi(p) = 1/(p^2 + beta^2), the classic rank-one potential (alpha = 2).
  static FormFactor yamaguchi(double beta);

  double operator()(double p) const;
  double eval(double p) const { return (*this)(p); }

  FormFactorKind kind() const { return kind_; }
  double tail_exponent() const { return alpha_; }
  double beta() const { return beta_; }
  Regime regime() const { return regime_of(alpha_); }

 private:
  FormFactor(FormFactorKind kind, double alpha, double beta);

  FormFactorKind kind_;
  double alpha_;
  double beta_;
};

}  // namespace sepdyn
