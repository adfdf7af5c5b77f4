#include "sepdyn/model.hpp"

#include <cmath>

namespace sepdyn {

const char* coupling_kind_name(CouplingKind k) {
  switch (k) {
    case CouplingKind::lambda: return "lambda";
    case CouplingKind::g0: return "g0";
    case CouplingKind::tail_pair: return "tail_pair";
    case CouplingKind::cr: return "cr";
  }
  return "?";
}

void SeparableModel::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw DomainError("reduced mass mu must be positive and finite");
  if (!std::isfinite(coupling.value))
    throw DomainError("coupling value must be finite");

  const Regime r = phi.regime();
  switch (coupling.kind) {
    case CouplingKind::lambda:
      if (r != Regime::hamiltonian)
        throw DomainError("lambda coupling requires a tail exponent > 1/2");
      break;
    case CouplingKind::g0:
      if (r == Regime::hamiltonian)
        throw DomainError("g0 coupling requires a tail exponent <= 1/2");
      break;
    case CouplingKind::tail_pair:
      if (r != Regime::nonlocal)
        throw DomainError(
            "tail_pair coupling requires a tail exponent in (-1/2, 1/2)");
      break;
    case CouplingKind::cr:
      if (phi.kind() != FormFactorKind::unit)
        throw DomainError("cr coupling requires the unit form factor");
      break;
  }
}

}  // namespace sepdyn
