#include "sepdyn/loops.hpp"

#include <cmath>
#include <functional>

#include "sepdyn/errors.hpp"

namespace sepdyn {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------------------
// position of z relative to the cut along [0, inf)
// ---------------------------------------------------------------------------

enum class ZClass {
  off_axis,    // Im z != 0
  real_left,   // Im z == 0, Re z <= 0 (includes the branch point z = 0)
  upper_edge,  // Im z == +0, Re z > 0
  lower_edge,  // Im z == -0, Re z > 0
};

ZClass classify(Complex z) {
  if (z.imag() != 0.0) return ZClass::off_axis;
  if (z.real() > 0.0)
    return std::signbit(z.imag()) ? ZClass::lower_edge : ZClass::upper_edge;
  return ZClass::real_left;
}

bool on_cut(ZClass c) {
  return c == ZClass::upper_edge || c == ZClass::lower_edge;
}

// Quadrature parameters scaled so the semi-infinite tail split lands beyond
// all structure: the pole region k ~ sqrt(m |z|) and the form-factor range.
QuadratureSpec loop_spec(const SeparableModel& model, double zmag) {
  QuadratureSpec s{};
  s.tail_start = std::max(s.tail_start,
                          8.0 * std::sqrt(model.mass() * zmag));
  if (model.phi.beta() > 0.0)
    s.tail_start = std::max(s.tail_start, 8.0 * model.phi.beta());
  return s;
}

// ---------------------------------------------------------------------------
// principal-value evaluation on the cut
//
// F = (1/2 pi^2) \int_0^inf h(k)/(z - E_k) dk  at  z = E ± i0,  E > 0,
// via 1/(z - E_k) = m [ PV 1/(kon^2 - k^2) ∓ i pi delta(kon^2 - k^2) ].
// The PV window [kon/2, 2 kon] makes the bare weight integrate exactly to
// zero, so only the regularized difference (h(k) - h(kon)) is integrated
// there; head and tail see no singularity.
// ---------------------------------------------------------------------------

IntegralResult cut_limit(const std::function<Complex(double)>& h, double E,
                         double m, bool upper, const QuadratureSpec& spec) {
  const double kon = std::sqrt(m * E);
  const double kon2 = kon * kon;
  const Complex hk = h(kon);

  const IntegralResult head = integrate_finite(
      [&](double k) { return h(k) / (kon2 - k * k); }, 0.0, 0.5 * kon, spec);
  const IntegralResult core = integrate_finite(
      [&](double k) { return (h(k) - hk) / (kon2 - k * k); }, 0.5 * kon,
      2.0 * kon, spec);

  QuadratureSpec tail_spec = spec;
  tail_spec.tail_start = std::max(spec.tail_start, 8.0 * kon);
  const IntegralResult tail = integrate_semiinf(
      [&](double q) {
        const double k = q + 2.0 * kon;
        return h(k) / (kon2 - k * k);
      },
      tail_spec);

  const double pref = m / (2.0 * kPi * kPi);
  IntegralResult out;
  out.value = pref * (head.value + core.value + tail.value) +
              Complex(0.0, upper ? -1.0 : 1.0) * (kPi * pref) * hk /
                  (2.0 * kon);
  out.error_bound =
      pref * (head.error_bound + core.error_bound + tail.error_bound);
  return out;
}

LoopResult as_loop(IntegralResult r) {
  return {r.value, r.error_bound, LoopMethod::quadrature};
}

LoopResult analytic(Complex v, double cancellation = 1.0) {
  return {v, 4e-16 * cancellation * std::abs(v), LoopMethod::analytic};
}

void require_positive_mu(const SeparableModel& model) {
  if (!(model.mu > 0.0))
    throw DomainError("reduced mass mu must be positive");
}

}  // namespace

// ===========================================================================
// tail coefficient
// ===========================================================================

double b1_of_alpha(double alpha, double mu) {
  if (!(alpha > -0.5) || !(alpha <= 0.5))
    throw DomainError("b1_of_alpha requires -1/2 < alpha <= 1/2");
  if (!(mu > 0.0)) throw DomainError("b1_of_alpha requires mu > 0");
  return -4.0 * kPi * cos_pi(alpha) * std::pow(2.0 * mu, alpha - 1.5);
}

// ===========================================================================
// I(z) = (1/2 pi^2) \int dk k^2 phi^2 / (z - E_k)
// ===========================================================================

LoopResult loop_I(const SeparableModel& model, Complex z) {
  require_positive_mu(model);
  const double alpha = model.phi.tail_exponent();
  if (!(alpha > 0.5))
    throw DivergenceError(
        "resolvent loop is ultraviolet-divergent for tail exponent <= 1/2");
  const double m = model.mass();

  if (model.phi.kind() == FormFactorKind::yamaguchi) {
    const double beta = model.phi.beta();
    const Complex kappa = principal_power(-(m * z), 0.5);
    const Complex d = beta + kappa;
    return analytic(-m / (8.0 * kPi * beta * d * d));
  }
  if (model.phi.kind() == FormFactorKind::pure_power && alpha >= 1.5)
    throw DivergenceError(
        "pure_power resolvent loop is infrared-divergent for alpha >= 3/2");

  const auto h = [&](double k) {
    const double f = model.phi(k);
    return Complex(k * k * f * f, 0.0);
  };
  const QuadratureSpec spec = loop_spec(model, std::abs(z));
  const ZClass c = classify(z);
  if (on_cut(c))
    return as_loop(
        cut_limit(h, z.real(), m, c == ZClass::upper_edge, spec));
  return as_loop(integrate_semiinf(
      [&](double k) { return h(k) / (z - model.energy_of(k)); }, spec,
      Measure::radial3d));
}

// ===========================================================================
// K(z) = (1/2 pi^2) \int dk k^2 phi^2 / ((z - E_k) E_k)
//      = (1/2 pi^2) \int dk m phi^2 / (z - E_k)
// ===========================================================================

LoopResult weighted_K(const SeparableModel& model, Complex z) {
  require_positive_mu(model);
  const double alpha = model.phi.tail_exponent();
  const double m = model.mass();
  if (z == Complex(0.0, 0.0))
    throw DomainError("weighted kernel is singular at z = 0");

  if (model.phi.kind() == FormFactorKind::unit)
    return analytic(-std::pow(m, 1.5) / (4.0 * kPi) *
                    principal_power(-z, -0.5));
  if (model.phi.kind() == FormFactorKind::pure_power) {
    if (alpha >= 0.5)
      throw DivergenceError(
          "pure_power weighted kernel is infrared-divergent for "
          "alpha >= 1/2");
    return analytic(principal_power(-z, -alpha - 0.5) /
                    b1_of_alpha(alpha, model.mu));
  }

  const auto h = [&](double k) {
    const double f = model.phi(k);
    return Complex(m * f * f, 0.0);
  };
  const QuadratureSpec spec = loop_spec(model, std::abs(z));
  const ZClass c = classify(z);
  if (on_cut(c))
    return as_loop(
        cut_limit(h, z.real(), m, c == ZClass::upper_edge, spec));
  return as_loop(integrate_semiinf(
      [&](double k) { return h(k) / (z - model.energy_of(k)); }, spec,
      Measure::radial3d));
}

// ===========================================================================
// M(s) = (1/2 pi^2) \int dk k^2 (phi^2 - k^{-2 alpha}) / (s - E_k)
// ===========================================================================

LoopResult subtracted_M(const SeparableModel& model, Complex s) {
  require_positive_mu(model);
  if (model.phi.regime() != Regime::nonlocal)
    throw UnsupportedRegimeError(
        "tail-subtracted kernel requires a tail exponent in (-1/2, 1/2)");
  const double alpha = model.phi.tail_exponent();
  const double m = model.mass();

  if (model.phi.kind() == FormFactorKind::unit ||
      model.phi.kind() == FormFactorKind::pure_power) {
    LoopResult r = analytic(Complex(0.0, 0.0));
    r.error_bound = 0.0;  // integrand is identically zero
    return r;
  }

  // k^2 phi^2 - k^{2-2a} = k^{2-2a} [ (1 + b^2/k^2)^{-a} - 1 ]: evaluated
  // through expm1/log1p (series for tiny b^2/k^2) because the raw
  // difference of the two huge terms cancels catastrophically at large k.
  const double beta = model.phi.beta();
  const auto h = [alpha, beta](double k) {
    const double x = (beta * beta) / (k * k);
    double v;
    if (x < 1e-8) {
      v = -alpha * beta * beta * std::pow(k, -2.0 * alpha) *
          (1.0 - 0.5 * (alpha + 1.0) * x);
    } else {
      v = std::pow(k, 2.0 - 2.0 * alpha) *
          std::expm1(-alpha * std::log1p(x));
    }
    return Complex(v, 0.0);
  };
  const QuadratureSpec spec = loop_spec(model, std::abs(s));
  const ZClass c = classify(s);
  if (on_cut(c))
    return as_loop(
        cut_limit(h, s.real(), m, c == ZClass::upper_edge, spec));
  return as_loop(integrate_semiinf(
      [&](double k) { return h(k) / (s - model.energy_of(k)); }, spec,
      Measure::radial3d));
}

// ===========================================================================
// J(z1, z2) = (1/2 pi^2) \int dk k^2 phi^2 / ((z1 - E_k)(z2 - E_k))
// ===========================================================================

LoopResult resolvent_J(const SeparableModel& model, Complex z1, Complex z2) {
  require_positive_mu(model);
  if (z1 == z2)
    throw DegenerateArgumentsError(
        "coincident energies in the two-resolvent loop: use "
        "second_moment_D");
  const ZClass c1 = classify(z1);
  const ZClass c2 = classify(z2);
  if (on_cut(c1) && on_cut(c2))
    throw DomainError(
        "two-resolvent loop with both energies on the cut is not supported");

  const double alpha = model.phi.tail_exponent();
  const double m = model.mass();

  if (model.phi.kind() == FormFactorKind::unit) {
    const Complex s1 = principal_power(-z1, 0.5);
    const Complex s2 = principal_power(-z2, 0.5);
    return analytic(std::pow(m, 1.5) / (4.0 * kPi) / (s1 + s2));
  }
  if (model.phi.kind() == FormFactorKind::pure_power && alpha < 0.5) {
    const Complex p1 = principal_power(-z1, 0.5 - alpha);
    const Complex p2 = principal_power(-z2, 0.5 - alpha);
    const double cancel =
        (std::abs(p1) + std::abs(p2)) / std::max(std::abs(p2 - p1), 1e-300);
    return analytic((p2 - p1) / (b1_of_alpha(alpha, model.mu) * (z2 - z1)),
                    cancel);
  }
  if (model.phi.kind() == FormFactorKind::yamaguchi) {
    const LoopResult i1 = loop_I(model, z1);
    const LoopResult i2 = loop_I(model, z2);
    const double cancel = (std::abs(i1.value) + std::abs(i2.value)) /
                          std::max(std::abs(i1.value - i2.value), 1e-300);
    return analytic((i1.value - i2.value) / (z2 - z1), cancel);
  }

  const QuadratureSpec spec =
      loop_spec(model, std::max(std::abs(z1), std::abs(z2)));
  if (on_cut(c1) || on_cut(c2)) {
    const Complex z_cut = on_cut(c1) ? z1 : z2;
    const Complex z_off = on_cut(c1) ? z2 : z1;
    const bool upper = !std::signbit(z_cut.imag());
    const auto h = [&](double k) {
      const double f = model.phi(k);
      return k * k * f * f / (z_off - model.energy_of(k));
    };
    return as_loop(cut_limit(h, z_cut.real(), m, upper, spec));
  }
  return as_loop(integrate_semiinf(
      [&](double k) {
        const double f = model.phi(k);
        const Complex e(model.energy_of(k), 0.0);
        return k * k * f * f / ((z1 - e) * (z2 - e));
      },
      spec, Measure::radial3d));
}

// ===========================================================================
// D(z) = (1/2 pi^2) \int dk k^2 phi^2 / (z - E_k)^2
// ===========================================================================

LoopResult second_moment_D(const SeparableModel& model, Complex z) {
  require_positive_mu(model);
  if (z.imag() == 0.0 && z.real() >= 0.0)
    throw DomainError(
        "second moment has a double pole on the cut; request z off the "
        "non-negative real axis");
  const double alpha = model.phi.tail_exponent();
  const double m = model.mass();

  if (model.phi.kind() == FormFactorKind::unit)
    return analytic(std::pow(m, 1.5) / (8.0 * kPi) *
                    principal_power(-z, -0.5));
  if (model.phi.kind() == FormFactorKind::pure_power) {
    if (alpha >= 1.5)
      throw DivergenceError(
          "pure_power second moment is infrared-divergent for alpha >= 3/2");
    if (alpha < 0.5)
      return analytic(-(0.5 - alpha) *
                      principal_power(-z, -0.5 - alpha) /
                      b1_of_alpha(alpha, model.mu));
    // 1/2 <= alpha < 3/2: no closed form in the catalogue; fall through.
  } else if (model.phi.kind() == FormFactorKind::yamaguchi) {
    const double beta = model.phi.beta();
    const Complex kappa = principal_power(-(m * z), 0.5);
    const Complex d = beta + kappa;
    return analytic(m * m / (8.0 * kPi * beta * kappa * d * d * d));
  }

  const QuadratureSpec spec = loop_spec(model, std::abs(z));
  return as_loop(integrate_semiinf(
      [&](double k) {
        const double f = model.phi(k);
        const Complex d = z - model.energy_of(k);
        return k * k * f * f / (d * d);
      },
      spec, Measure::radial3d));
}

}  // namespace sepdyn
