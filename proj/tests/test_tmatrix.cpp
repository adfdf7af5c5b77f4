#include "sepdyn/tmatrix.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "sepdyn/errors.hpp"

using namespace sepdyn;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

SeparableModel yam_lambda(double beta, double lambda) {
  SeparableModel m;
  m.phi = FormFactor::yamaguchi(beta);
  m.coupling = Coupling::lambda(lambda);
  return m;
}

SeparableModel unit_g0(double g0) {
  SeparableModel m;
  m.phi = FormFactor::unit();
  m.coupling = Coupling::g0(g0);
  return m;
}

SeparableModel unit_cr(double cr) {
  SeparableModel m;
  m.phi = FormFactor::unit();
  m.coupling = Coupling::cr(cr);
  return m;
}

SeparableModel pure_b(double alpha, double b2) {
  SeparableModel m;
  m.phi = FormFactor::pure_power(alpha);
  m.coupling = Coupling::tail_b2(b2);
  return m;
}

SeparableModel reg_b(double alpha, double beta, double b2) {
  SeparableModel m;
  m.phi = FormFactor::regulated_power(alpha, beta);
  m.coupling = Coupling::tail_b2(b2);
  return m;
}

SeparableModel reg_g0(double alpha, double beta, double g0) {
  SeparableModel m;
  m.phi = FormFactor::regulated_power(alpha, beta);
  m.coupling = Coupling::g0(g0);
  return m;
}

double rel(Complex a, Complex b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

// ===========================================================================
// Hamiltonian-coupling amplitude
// ===========================================================================

TEST_CASE("t_hamiltonian: closed forms, weak and strong coupling") {
  const SeparableModel m = yam_lambda(1.0, 1.0);

  // 1/t = 1/lambda - I(-1), I(-1) = -1/(32 pi).
  const Complex t = t_hamiltonian(m, Complex(-1.0, 0.0));
  const double expected = 1.0 / (1.0 + 1.0 / (32.0 * kPi));
  CHECK(rel(t, Complex(expected, 0.0)) < 1e-14);

  // Far from the spectrum the loop dies out and t -> lambda.
  const Complex far = t_hamiltonian(m, Complex(-1e10, 0.0));
  CHECK(std::abs(far - 1.0) < 1e-10);

  // Zero coupling switches the interaction off entirely.
  const SeparableModel free_model = yam_lambda(1.0, 0.0);
  CHECK(t_hamiltonian(free_model, Complex(-2.0, 0.0)) == Complex(0.0, 0.0));

  // Wrong coupling kind is rejected.
  CHECK_THROWS_AS(t_hamiltonian(unit_g0(1.0), Complex(-1.0, 0.0)),
                  DomainError);
}

TEST_CASE("t_hamiltonian: bound-state pole is detected and located") {
  // 1/lambda = I(-1) = -1/(32 pi) puts the pole exactly at z = -1.
  const SeparableModel m = yam_lambda(1.0, -32.0 * kPi);
  CHECK_THROWS_AS((void)t_hamiltonian(m, Complex(-1.0, 0.0)), PoleError);

  // Nearby evaluations stay finite.
  CHECK(std::isfinite(t_hamiltonian(m, Complex(-1.01, 0.0)).real()));

  const auto pole = find_pole(m);
  REQUIRE(pole.has_value());
  CHECK(std::abs(*pole + 1.0) < 1e-10);
}

// ===========================================================================
// zero-energy-coupling amplitude and the contact-interaction limit
// ===========================================================================

TEST_CASE("t_nonlocal: unit form factor reproduces the contact amplitude") {
  const double cr = 8.0 * kPi;
  const SeparableModel m = unit_g0(cr);

  // t(0) is pinned to the coupling exactly.
  CHECK(t_nonlocal(m, Complex(0.0, 0.0)) == Complex(cr, 0.0));
  CHECK(t_eft_lo(cr, 1.0, Complex(0.0, 0.0)) == Complex(cr, 0.0));

  // Pointwise agreement with the closed contact form on a z-grid.
  const std::vector<Complex> grid = {
      {-0.3, 0.0}, {-2.0, 0.0}, {-40.0, 0.0}, {1.5, 2.0},
      {-1.0, -3.0}, {0.5, 1e-3}, {4.0, 0.0},  {4.0, -0.0}};
  for (const Complex z : grid) {
    const Complex a = t_nonlocal(m, z);
    const Complex b = t_eft_lo(cr, 1.0, z);
    CHECK(rel(a, b) < 1e-13);
  }

  // Zero coupling gives the free amplitude.
  CHECK(t_nonlocal(unit_g0(0.0), Complex(-1.0, 0.0)) == Complex(0.0, 0.0));
  CHECK_THROWS_AS(t_nonlocal(unit_cr(1.0), Complex(-1.0, 0.0)), DomainError);
}

TEST_CASE("t_eft_lo: threshold value, pole position, bound state") {
  const double cr = 8.0 * kPi;  // scattering length a = m cr / 4 pi = 2
  CHECK(t_eft_lo(cr, 1.0, Complex(0.0, 0.0)).real() == cr);

  // Denominator vanishes at z = -1/(m a^2) = -0.25.
  CHECK_THROWS_AS((void)t_eft_lo(cr, 1.0, Complex(-0.25, 0.0)), PoleError);

  const auto eb = bound_state_energy(cr, 1.0);
  REQUIRE(eb.has_value());
  CHECK(std::abs(*eb + 0.25) < 1e-15);

  // Negative coupling binds nothing.
  CHECK(!bound_state_energy(-cr, 1.0).has_value());
  CHECK_THROWS_AS(bound_state_energy(cr, 0.0), DomainError);

  // find_pole recovers the bound state from the amplitude itself.
  const auto pole = find_pole(unit_cr(cr));
  REQUIRE(pole.has_value());
  CHECK(std::abs(*pole + 0.25) < 1e-10);
  CHECK(!find_pole(unit_cr(-5.0)).has_value());
  CHECK_THROWS_AS(find_pole(unit_cr(cr), -1.0, 2.0), DomainError);
}

// ===========================================================================
// tail-pair amplitude
// ===========================================================================

TEST_CASE("n_of_z: closed form and equivalence with the g0 route") {
  // Unit form factor: b1 = -4 pi, b2 = -b1^2 / cr reproduces the contact
  // amplitude exactly.
  const double cr = 8.0 * kPi;
  const double b1 = b1_of_alpha(0.0, 0.5);
  CHECK(std::abs(b1 + 4.0 * kPi) < 1e-14);
  const SeparableModel mu{0.5, FormFactor::unit(),
                          Coupling::tail_b2(-b1 * b1 / cr)};
  const std::vector<Complex> grid = {
      {-0.7, 0.0}, {-5.0, 0.0}, {2.0, 1.0}, {1.0, -0.5}, {3.0, 0.0}};
  for (const Complex z : grid)
    CHECK(rel(n_of_z(mu, z), t_eft_lo(cr, 1.0, z)) < 1e-13);
  CHECK(std::abs(g0_from_b(mu) - cr) < 1e-12 * cr);

  // Pure power tail: closed expression b1^2 / (-b2 + b1 (-z)^{1/2-alpha}).
  const SeparableModel mp = pure_b(0.25, 1.0);
  const double c1 = b1_of_alpha(0.25, 0.5);
  const Complex z0(-1.0, 0.0);
  const Complex expected = c1 * c1 / Complex(-1.0 + c1, 0.0);
  CHECK(rel(n_of_z(mp, z0), expected) < 1e-13);

  // Same amplitude through the g0 parametrization (M == 0 for pure powers,
  // so g0 = -b1^2/b2).
  const SeparableModel mp_g = [&] {
    SeparableModel m = mp;
    m.coupling = Coupling::g0(g0_from_b(mp));
    return m;
  }();
  for (const Complex z :
       {Complex(-0.4, 0.0), Complex(-3.0, 0.0), Complex(1.0, 2.0)})
    CHECK(rel(n_of_z(mp, z), t_nonlocal(mp_g, z)) < 1e-12);

  CHECK_THROWS_AS(n_of_z(unit_g0(1.0), z0), DomainError);
}

TEST_CASE("n_of_z: regulated tail, dual route through g0") {
  // Regulated power: M(z) is a genuine quadrature, and the two
  // parametrizations traverse different integrals.
  const SeparableModel mb = reg_b(0.25, 1.5, 0.8);
  const double g0 = g0_from_b(mb);
  SeparableModel mg = mb;
  mg.coupling = Coupling::g0(g0);

  // t(0) ties the two couplings together.
  const Amplitude a0 = t_with_bound(mb, Complex(0.0, 0.0));
  CHECK(std::abs(a0.value.real() - g0) <
        1e-8 * std::abs(g0) + 2.0 * a0.error_bound);

  for (const Complex z : {Complex(-0.6, 0.0), Complex(-4.0, 0.0),
                          Complex(2.0, 1.5), Complex(-20.0, 0.0)}) {
    const Amplitude a = t_with_bound(mb, z);
    const Amplitude b = t_with_bound(mg, z);
    const double tol =
        20.0 * (a.error_bound + b.error_bound) + 1e-12 * std::abs(a.value);
    CHECK(std::abs(a.value - b.value) < tol);
  }
}

TEST_CASE("g0_from_b: singular tail pairs are rejected") {
  // Pure power with b2 = 0: the zero-energy amplitude diverges.
  CHECK_THROWS_AS(g0_from_b(pure_b(0.25, 0.0)), SingularCouplingError);

  // Regulated power with b2 tuned against b1^2 M(0).
  const SeparableModel probe = reg_b(0.25, 1.5, 1.0);
  const double b1 = b1_of_alpha(0.25, probe.mu);
  const LoopResult m0 = subtracted_M(probe, Complex(0.0, 0.0));
  const SeparableModel tuned =
      reg_b(0.25, 1.5, -b1 * b1 * m0.value.real());
  CHECK_THROWS_AS(g0_from_b(tuned), SingularCouplingError);

  CHECK_THROWS_AS(g0_from_b(unit_g0(1.0)), DomainError);
}

// ===========================================================================
// edge values and unitarity sign convention
// ===========================================================================

TEST_CASE("amplitude on the upper edge: Im t <= 0, lower edge conjugates") {
  const std::vector<SeparableModel> models = {
      unit_cr(8.0 * kPi),
      yam_lambda(1.0, 1.0),
      reg_g0(0.25, 1.5, 2.0),
      pure_b(0.25, 1.0),
  };
  for (const SeparableModel& m : models) {
    for (const double e : {0.5, 2.0}) {
      const Complex up = t_of(m, Complex(e, 0.0));
      const Complex dn = t_of(m, Complex(e, -0.0));
      CHECK(up.imag() <= 0.0);
      CHECK((1.0 / up).imag() >= 0.0);
      CHECK(rel(dn, std::conj(up)) < 1e-9);
    }
  }
}

// ===========================================================================
// two-point identity residual
// ===========================================================================

TEST_CASE("hilbert_residual: degenerate pair and contact closed form") {
  const SeparableModel m = unit_cr(8.0 * kPi);
  double budget = -1.0;
  CHECK(hilbert_residual(m, Complex(-1.0, 0.0), Complex(-1.0, 0.0),
                         &budget) == 0.0);
  CHECK(budget == 0.0);

  const double r =
      hilbert_residual(m, Complex(-1.0, 0.0), Complex(-4.0, 0.0), &budget);
  CHECK(r < 1e-10);
  CHECK(r <= 10.0 * budget);
  CHECK(budget < 1e-10);
}

TEST_CASE("hilbert_residual: random off-axis pairs across model families") {
  std::mt19937 rng(20260819u);
  std::uniform_real_distribution<double> ux(-8.0, -0.1);
  std::uniform_real_distribution<double> uy(0.1, 2.0);
  std::bernoulli_distribution flip(0.5);

  const std::vector<SeparableModel> models = {
      pure_b(0.0, 0.7),
      pure_b(0.25, 0.7),
      pure_b(0.45, 0.7),
      yam_lambda(1.0, 0.8),
  };
  for (const SeparableModel& m : models) {
    for (int i = 0; i < 12; ++i) {
      const Complex z1(ux(rng), flip(rng) ? uy(rng) : -uy(rng));
      const Complex z2(ux(rng), flip(rng) ? uy(rng) : -uy(rng));
      double budget = 0.0;
      const double r = hilbert_residual(m, z1, z2, &budget);
      CHECK(r <= 10.0 * budget);
      CHECK(budget < 1e-6);
    }
  }
}

// ===========================================================================
// flow-equation residual
// ===========================================================================

TEST_CASE("ode_residual: contact amplitude satisfies the flow equation") {
  const SeparableModel m = unit_cr(8.0 * kPi);
  const double r = ode_residual(m, Complex(-1.0, 0.0), 1e-4);
  CHECK(r < 1e-6);

  const OdeCheck c = ode_residual_checked(m, Complex(-1.0, 0.0), 1e-4);
  CHECK(c.residual == r);
  CHECK(c.asymptotic);
  // Central differences contract like h^2 unless noise dominates first.
  const bool quartered =
      c.richardson_ratio > 2.5 && c.richardson_ratio < 6.5;
  const bool noise_limited = c.refined_residual <= 10.0 * c.noise_floor;
  CHECK((quartered || noise_limited));
}

TEST_CASE("ode_residual: analytic and quadrature-backed tails") {
  CHECK(ode_residual(pure_b(0.25, 1.0), Complex(-2.0, 0.0), 1e-4) < 1e-5);
  CHECK(ode_residual(yam_lambda(1.0, 1.0), Complex(-1.5, 0.0), 1e-4) < 1e-6);
  CHECK(ode_residual(reg_g0(0.25, 1.5, 2.0), Complex(-1.5, 0.0), 1e-4) <
        1e-5);
  CHECK_THROWS_AS(ode_residual(unit_cr(1.0), Complex(-1.0, 0.0), 0.0),
                  DomainError);
}

TEST_CASE("ode_residual_checked: weak coupling is noise-limited, flagged") {
  const SeparableModel m = yam_lambda(1.0, 1e-8);
  const OdeCheck c = ode_residual_checked(m, Complex(-1.0, 0.0), 1e-4);
  // The derivative signal is ~1e-22; rounding in t dominates the central
  // difference. The check must recognize its own noise floor.
  CHECK(c.asymptotic);
  CHECK(c.refined_residual <= 10.0 * c.noise_floor);
}

// ===========================================================================
// on-shell observables
// ===========================================================================

TEST_CASE("ere_function: contact amplitude gives a pure constant") {
  const SeparableModel m = unit_cr(8.0 * kPi);  // a = 2
  for (const double p : {1e-2, 0.1, 1.0, 10.0}) {
    const Complex e = ere_function(m, p);
    CHECK(std::abs(e.real() + 0.5) < 1e-10);
    CHECK(std::abs(e.imag()) < 1e-10);
    CHECK(std::abs(phase_shift(m, p) - std::atan(-2.0 * p)) < 1e-10);
  }
  // Low-momentum limit: delta ~ -a p.
  const double p0 = 1e-3;
  CHECK(std::abs(phase_shift(m, p0) + 2.0 * p0) < 1e-8);

  CHECK_THROWS_AS(ere_function(yam_lambda(1.0, 1.0), 1.0), DomainError);
  CHECK_THROWS_AS(ere_function(m, 0.0), DomainError);
}

TEST_CASE("ere_function: g0-coupled unit model matches the cr route") {
  const SeparableModel mg = unit_g0(8.0 * kPi);
  for (const double p : {0.05, 0.7, 3.0}) {
    const Complex e = ere_function(mg, p);
    CHECK(std::abs(e.real() + 0.5) < 1e-10);
  }
}

// ===========================================================================
// dispatch
// ===========================================================================

TEST_CASE("t_of: dispatches to the coupling-specific amplitude") {
  const Complex z(-1.3, 0.0);
  const SeparableModel a = yam_lambda(1.0, 0.9);
  CHECK(t_of(a, z) == t_hamiltonian(a, z));
  const SeparableModel b = unit_g0(2.0);
  CHECK(t_of(b, z) == t_nonlocal(b, z));
  const SeparableModel c = pure_b(0.25, 1.0);
  CHECK(t_of(c, z) == n_of_z(c, z));
  const SeparableModel d = unit_cr(5.0);
  CHECK(t_of(d, z) == t_eft_lo(5.0, 1.0, z));
}
