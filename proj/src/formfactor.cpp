#include "sepdyn/formfactor.hpp"

#include <cmath>

#include "sepdyn/errors.hpp"

namespace sepdyn {

// ===========================================================================
// regime classification
// ===========================================================================

Regime regime_of(double alpha) {
  if (!(alpha > -0.5))
    throw DomainError("tail exponent must exceed -1/2 for an integrable "
                      "weighted kernel");
  if (alpha > 0.5) return Regime::hamiltonian;
  if (alpha == 0.5) return Regime::log_marginal;
  return Regime::nonlocal;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::hamiltonian: return "hamiltonian";
    case Regime::log_marginal: return "log_marginal";
    case Regime::nonlocal: return "nonlocal";
  }
  return "?";
}

const char* form_factor_kind_name(FormFactorKind k) {
  switch (k) {
    case FormFactorKind::unit: return "unit";
    case FormFactorKind::pure_power: return "pure_power";
    case FormFactorKind::regulated_power: return "regulated_power";
    case FormFactorKind::yamaguchi: return "yamaguchi";
  }
  return "?";
}

// ===========================================================================
// construction
// ===========================================================================

FormFactor::FormFactor(FormFactorKind kind, double alpha, double beta)
    : kind_(kind), alpha_(alpha), beta_(beta) {
  regime_of(alpha_);  // enforces alpha > -1/2
  const bool needs_range =
      kind_ == FormFactorKind::regulated_power ||
      kind_ == FormFactorKind::yamaguchi;
  if (needs_range && !(beta_ > 0.0))
    throw DomainError("range parameter beta must be positive");
  if (!std::isfinite(alpha_) || !std::isfinite(beta_))
    throw DomainError("form factor parameters must be finite");
}

FormFactor FormFactor::unit() {
  return FormFactor(FormFactorKind::unit, 0.0, 0.0);
}

FormFactor FormFactor::pure_power(double alpha) {
  return FormFactor(FormFactorKind::pure_power, alpha, 0.0);
}

FormFactor FormFactor::regulated_power(double alpha, double beta) {
  return FormFactor(FormFactorKind::regulated_power, alpha, beta);
}

FormFactor FormFactor::yamaguchi(double beta) {
  return FormFactor(FormFactorKind::yamaguchi, 2.0, beta);
}

// ===========================================================================
// evaluation
// ===========================================================================

double FormFactor::operator()(double p) const {
  if (!(p >= 0.0)) throw DomainError("form factor momentum must be >= 0");
  switch (kind_) {
    case FormFactorKind::unit:
      return 1.0;
    case FormFactorKind::pure_power:
      if (p == 0.0) {
        if (alpha_ > 0.0)
          throw DomainError("pure_power form factor diverges at p = 0");
        if (alpha_ == 0.0) return 1.0;
        return 0.0;  // p^{-alpha} with alpha < 0 vanishes at the origin
      }
      return std::pow(p, -alpha_);
    case FormFactorKind::regulated_power:
      return std::pow(p * p + beta_ * beta_, -0.5 * alpha_);
    case FormFactorKind::yamaguchi:
      return 1.0 / (p * p + beta_ * beta_);
  }
  throw DomainError("unreachable form factor kind");
}

}  // namespace sepdyn
