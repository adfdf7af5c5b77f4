#include "sepdyn/tmatrix.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "sepdyn/errors.hpp"

namespace sepdyn {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------------------
// inverse amplitude 1/t(z) per coupling kind
// ---------------------------------------------------------------------------

struct Denominator {
  Complex value{0.0, 0.0};
  double bound = 0.0;  // propagated quadrature error
  double scale = 0.0;  // local magnitude, for pole detection
};

Denominator inverse_amplitude(const SeparableModel& model, Complex z) {
  model.validate();
  Denominator d;
  switch (model.coupling.kind) {
    case CouplingKind::lambda: {
      const LoopResult i = loop_I(model, z);
      const double inv = 1.0 / model.coupling.value;
      d.value = inv - i.value;
      d.bound = i.error_bound;
      d.scale = std::max(std::abs(inv), std::abs(i.value));
      return d;
    }
    case CouplingKind::g0: {
      Complex zk{0.0, 0.0};
      double zk_bound = 0.0;
      if (z != Complex(0.0, 0.0)) {
        const LoopResult k = weighted_K(model, z);
        zk = z * k.value;
        zk_bound = std::abs(z) * k.error_bound;
      }
      const double inv = 1.0 / model.coupling.value;
      d.value = inv - zk;
      d.bound = zk_bound;
      d.scale = std::max(std::abs(inv), std::abs(zk));
      return d;
    }
    case CouplingKind::tail_pair: {
      const double alpha = model.phi.tail_exponent();
      const double b1 = b1_of_alpha(alpha, model.mu);
      const double b2 = model.coupling.value;
      const LoopResult m = subtracted_M(model, z);
      const Complex power = b1 * principal_power(-z, 0.5 - alpha);
      const Complex mm = m.value * (b1 * b1);
      d.value = (-b2 + power - mm) / (b1 * b1);
      d.bound = m.error_bound;
      d.scale = (std::abs(b2) + std::abs(power) + std::abs(mm)) / (b1 * b1);
      return d;
    }
    case CouplingKind::cr: {
      const double m = model.mass();
      const double inv = 1.0 / model.coupling.value;
      const Complex term =
          std::pow(m, 1.5) / (4.0 * kPi) * principal_power(-z, 0.5);
      d.value = inv - term;
      d.bound = 0.0;
      d.scale = std::max(std::abs(inv), std::abs(term));
      return d;
    }
  }
  throw DomainError("unreachable coupling kind");
}

Amplitude invert(const SeparableModel& model, const Denominator& d,
                 Complex z) {
  if (!std::isfinite(d.value.real()) || !std::isfinite(d.value.imag()))
    return {Complex(0.0, 0.0), 0.0};  // infinite inverse amplitude: t = 0
  if (std::abs(d.value) < 1e-12 * d.scale) {
    std::string msg = "amplitude pole at the requested energy";
    try {
      // d(1/t)/dz = D(z), so the residue of t at the pole is 1/D.
      const LoopResult dd = second_moment_D(model, z);
      const Complex res = 1.0 / dd.value;
      char buf[80];
      std::snprintf(buf, sizeof buf, " (residue ~ %.6g%+.6gi)", res.real(),
                    res.imag());
      msg += buf;
    } catch (const Error&) {
    }
    throw PoleError(msg, z);
  }
  const Complex t = 1.0 / d.value;
  return {t, std::abs(t) * std::abs(t) * d.bound};
}

struct OdePieces {
  double residual = 0.0;
  double noise = 0.0;
};

OdePieces ode_pieces(const SeparableModel& model, Complex z, double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  const Amplitude tp = t_with_bound(model, z + h);
  const Amplitude tm = t_with_bound(model, z - h);
  const Amplitude t0 = t_with_bound(model, z);
  const LoopResult d = second_moment_D(model, z);

  const Complex rhs = t0.value * t0.value * d.value;
  const double denom = std::abs(rhs);
  if (denom == 0.0) return {0.0, 0.0};

  const Complex fd = (tp.value - tm.value) / (2.0 * h);
  const double eps = std::numeric_limits<double>::epsilon();
  const double noise =
      (tp.error_bound + tm.error_bound +
       4.0 * eps * (std::abs(tp.value) + std::abs(tm.value))) /
          (2.0 * h) +
      2.0 * std::abs(t0.value) * t0.error_bound * std::abs(d.value) +
      std::abs(t0.value) * std::abs(t0.value) * d.error_bound;
  return {std::abs(fd + rhs) / denom, noise / denom};
}

}  // namespace

// ===========================================================================
// coupling conversion
// ===========================================================================

double g0_from_b(const SeparableModel& model) {
  model.validate();
  if (model.coupling.kind != CouplingKind::tail_pair)
    throw DomainError("g0_from_b requires a tail_pair coupling");
  const double alpha = model.phi.tail_exponent();
  const double b1 = b1_of_alpha(alpha, model.mu);
  const double b2 = model.coupling.value;
  const LoopResult m0 = subtracted_M(model, Complex(0.0, 0.0));
  const double den = b2 + b1 * b1 * m0.value.real();
  const double scale =
      std::abs(b2) + b1 * b1 * (std::abs(m0.value.real()) + m0.error_bound);
  if (den == 0.0 || std::abs(den) < 1e-12 * scale ||
      std::abs(den) <= 2.0 * b1 * b1 * m0.error_bound)
    throw SingularCouplingError(
        "b2 + b1^2 M(0) vanishes; the tail pair defines no zero-energy "
        "amplitude");
  return -b1 * b1 / den;
}

// ===========================================================================
// amplitudes
// ===========================================================================

Amplitude t_with_bound(const SeparableModel& model, Complex z) {
  model.validate();
  // At z = 0 the g0 and cr parametrizations are pinned to the coupling
  // itself; return it exactly instead of round-tripping through 1/(1/g).
  if (z == Complex(0.0, 0.0) && (model.coupling.kind == CouplingKind::g0 ||
                                 model.coupling.kind == CouplingKind::cr))
    return {Complex(model.coupling.value, 0.0), 0.0};
  return invert(model, inverse_amplitude(model, z), z);
}

Complex t_of(const SeparableModel& model, Complex z) {
  return t_with_bound(model, z).value;
}

Complex t_hamiltonian(const SeparableModel& model, Complex z) {
  if (model.coupling.kind != CouplingKind::lambda)
    throw DomainError("t_hamiltonian requires a lambda coupling");
  return t_of(model, z);
}

Complex t_nonlocal(const SeparableModel& model, Complex z) {
  if (model.coupling.kind != CouplingKind::g0)
    throw DomainError("t_nonlocal requires a g0 coupling");
  return t_of(model, z);
}

Complex n_of_z(const SeparableModel& model, Complex z) {
  if (model.coupling.kind != CouplingKind::tail_pair)
    throw DomainError("n_of_z requires a tail_pair coupling");
  if (model.phi.regime() != Regime::nonlocal)
    throw DomainError("n_of_z requires the nonlocal regime");
  return t_of(model, z);
}

Complex t_eft_lo(double c_r, double m, Complex z) {
  if (!(m > 0.0)) throw DomainError("t_eft_lo requires a positive mass");
  SeparableModel model{0.5 * m, FormFactor::unit(), Coupling::cr(c_r)};
  return t_of(model, z);
}

// ===========================================================================
// identity residuals
// ===========================================================================

double hilbert_residual(const SeparableModel& model, Complex z1, Complex z2,
                        double* budget) {
  if (z1 == z2) {
    if (budget) *budget = 0.0;
    return 0.0;
  }
  const Amplitude t1 = t_with_bound(model, z1);
  const Amplitude t2 = t_with_bound(model, z2);
  const double scale = std::max(std::abs(t1.value), std::abs(t2.value));
  if (scale == 0.0) {
    if (budget) *budget = 0.0;
    return 0.0;
  }
  const LoopResult j = resolvent_J(model, z1, z2);
  const Complex lhs =
      t1.value - t2.value - (z2 - z1) * t2.value * t1.value * j.value;

  const double dz = std::abs(z2 - z1);
  const double eps = std::numeric_limits<double>::epsilon();
  double b = t1.error_bound * (1.0 + dz * std::abs(t2.value * j.value)) +
             t2.error_bound * (1.0 + dz * std::abs(t1.value * j.value)) +
             dz * std::abs(t1.value * t2.value) * j.error_bound;
  b += 16.0 * eps *
       (std::abs(t1.value) + std::abs(t2.value) +
        dz * std::abs(t1.value * t2.value * j.value));
  if (budget) *budget = b / scale;
  return std::abs(lhs) / scale;
}

double ode_residual(const SeparableModel& model, Complex z, double h) {
  return ode_pieces(model, z, h).residual;
}

OdeCheck ode_residual_checked(const SeparableModel& model, Complex z,
                              double h) {
  const OdePieces coarse = ode_pieces(model, z, h);
  const OdePieces fine = ode_pieces(model, z, 0.5 * h);
  OdeCheck c;
  c.residual = coarse.residual;
  c.refined_residual = fine.residual;
  c.noise_floor = fine.noise;
  c.richardson_ratio = coarse.residual / std::max(fine.residual, 1e-300);
  // Central differences contract like h^2 (ratio 4) until quadrature or
  // rounding noise takes over.
  c.asymptotic = (c.richardson_ratio > 2.5 && c.richardson_ratio < 6.5) ||
                 fine.residual <= 10.0 * fine.noise;
  return c;
}

// ===========================================================================
// on-shell observables
// ===========================================================================

Complex ere_function(const SeparableModel& model, double p) {
  if (model.phi.kind() != FormFactorKind::unit)
    throw DomainError(
        "effective-range function requires the unit form factor");
  if (!(p > 0.0)) throw DomainError("on-shell momentum must be positive");
  const double m = model.mass();
  const Complex z(p * p / m, 0.0);  // upper edge E_p + i0
  const Amplitude t = t_with_bound(model, z);  // phi(k_on) = 1 on shell
  const Complex ere =
      -4.0 * kPi / (m * t.value) + Complex(0.0, 1.0) * p;
  const double tol =
      4.0 * kPi * t.error_bound /
          (m * std::abs(t.value) * std::abs(t.value)) +
      1e-10 * (p + std::abs(ere.real())) + 1e-14;
  if (std::abs(ere.imag()) > 10.0 * tol)
    throw UnitarityViolationError(
        "on-shell unitarity violated: the inverse-amplitude combination "
        "kept an imaginary part");
  return ere;
}

double phase_shift(const SeparableModel& model, double p) {
  const Complex e = ere_function(model, p);
  if (e.real() == 0.0) return 0.5 * kPi;
  return std::atan(p / e.real());
}

std::optional<double> bound_state_energy(double c_r, double m) {
  if (!(m > 0.0)) throw DomainError("mass must be positive");
  if (!(c_r > 0.0)) return std::nullopt;
  return -16.0 * kPi * kPi / (m * m * m * c_r * c_r);
}

std::optional<double> find_pole(const SeparableModel& model, double e_min,
                                double e_max) {
  if (!(e_min < e_max) || !(e_max < 0.0))
    throw DomainError(
        "find_pole scans a window [e_min, e_max] on the negative axis");
  const auto den = [&](double e) {
    return inverse_amplitude(model, Complex(e, 0.0)).value.real();
  };

  const int n = 120;
  const double ratio = std::pow(e_min / e_max, 1.0 / n);
  double e_prev = e_max;
  double f_prev = den(e_prev);
  if (f_prev == 0.0) return e_prev;
  for (int i = 1; i <= n; ++i) {
    const double e = (i == n) ? e_min : e_max * std::pow(ratio, i);
    const double f = den(e);
    if (f == 0.0) return e;
    if ((f < 0.0) != (f_prev < 0.0)) {
      double lo = e, hi = e_prev, flo = f;  // lo < hi, opposite signs
      for (int it = 0;
           it < 200 && (hi - lo) > 1e-14 * std::min(std::abs(lo), std::abs(hi));
           ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = den(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    e_prev = e;
    f_prev = f;
  }
  return std::nullopt;
}

}  // namespace sepdyn
