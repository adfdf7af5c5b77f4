#include "sepdyn/loops.hpp"

#include <cmath>
#include <functional>

#include "doctest.h"
#include "sepdyn/errors.hpp"

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

using sepdyn::Complex;
using sepdyn::Coupling;
using sepdyn::FormFactor;
using sepdyn::LoopMethod;
using sepdyn::SeparableModel;

// Independent oracle: composite 40-point Gauss-Legendre on the log grid
// k = e^x, x in [-60, 75].  Completely different discretization from the
// library's adaptive Gauss-Kronrod + 1/k tail engine.  The wide range keeps
// truncation below 1e-13 even for tails as slow as k^{-1.4}.
Complex log_gl(const std::function<Complex(double)>& f, int panels = 270) {
  const auto& g = sepdyn::gauss_legendre(40);
  const double xmin = -60.0, xmax = 75.0;
  const double w = (xmax - xmin) / panels;
  Complex total{0.0, 0.0};
  for (int i = 0; i < panels; ++i) {
    const double a = xmin + i * w;
    for (std::size_t j = 0; j < g.x.size(); ++j) {
      const double x = a + 0.5 * w * (g.x[j] + 1.0);
      const double k = std::exp(x);
      total += 0.5 * w * g.w[j] * f(k) * k;  // dk = k dx
    }
  }
  return total / (2.0 * kPi * kPi);
}

SeparableModel yam(double beta = 1.0) {
  return {0.5, FormFactor::yamaguchi(beta), Coupling::lambda(1.0)};
}
// Same function as yamaguchi(beta) but dispatched through quadrature.
SeparableModel reg2(double beta = 1.0) {
  return {0.5, FormFactor::regulated_power(2.0, beta), Coupling::lambda(1.0)};
}
SeparableModel unit_ff() {
  return {0.5, FormFactor::unit(), Coupling::cr(1.0)};
}
SeparableModel pure(double alpha) {
  return {0.5, FormFactor::pure_power(alpha), Coupling::g0(-1.0)};
}
SeparableModel reg(double alpha, double beta) {
  return {0.5, FormFactor::regulated_power(alpha, beta), Coupling::g0(-1.0)};
}

}  // namespace

TEST_CASE("tail coefficient b1") {
  CHECK(sepdyn::b1_of_alpha(0.0, 0.5) ==
        doctest::Approx(-4.0 * kPi).epsilon(1e-14));
  CHECK(sepdyn::b1_of_alpha(0.25, 0.5) ==
        doctest::Approx(-4.0 * kPi * std::cos(kPi / 4.0)).epsilon(1e-13));
  CHECK(sepdyn::b1_of_alpha(0.5, 0.37) == 0.0);  // exact zero at the margin
  CHECK(sepdyn::b1_of_alpha(0.25, 2.0) ==
        doctest::Approx(-4.0 * kPi * std::cos(kPi / 4.0) *
                        std::pow(4.0, -1.25))
            .epsilon(1e-13));
  CHECK_THROWS_AS(sepdyn::b1_of_alpha(-0.5, 0.5), sepdyn::DomainError);
  CHECK_THROWS_AS(sepdyn::b1_of_alpha(0.6, 0.5), sepdyn::DomainError);
  CHECK_THROWS_AS(sepdyn::b1_of_alpha(0.25, 0.0), sepdyn::DomainError);
}

TEST_CASE("resolvent loop closed form") {
  const auto r = sepdyn::loop_I(yam(), Complex(-1.0, 0.0));
  CHECK(r.method == LoopMethod::analytic);
  CHECK(r.value.real() ==
        doctest::Approx(-1.0 / (32.0 * kPi)).epsilon(1e-13));
  CHECK(std::abs(r.value.imag()) < 1e-18);

  // Decays at large |z|.
  CHECK(std::abs(sepdyn::loop_I(yam(), Complex(-1e12, 0.0)).value) < 1e-12);

  CHECK_THROWS_AS(sepdyn::loop_I(unit_ff(), Complex(-1.0, 0.0)),
                  sepdyn::DivergenceError);
  CHECK_THROWS_AS(sepdyn::loop_I(pure(0.25), Complex(-1.0, 0.0)),
                  sepdyn::DivergenceError);
}

TEST_CASE("resolvent loop: quadrature agrees with the closed form") {
  // regulated_power(2, beta) is pointwise identical to yamaguchi(beta) but
  // takes the quadrature path.
  const double xs[] = {-0.5, -1.0, -2.0, -4.0, -8.0};
  const double ys[] = {-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0};
  for (double x : xs) {
    for (double y : ys) {
      const Complex z(x, y);
      const auto q = sepdyn::loop_I(reg2(), z);
      const auto a = sepdyn::loop_I(yam(), z);
      CAPTURE(x);
      CAPTURE(y);
      CHECK(q.method == LoopMethod::quadrature);
      CHECK(std::abs(q.value - a.value) <=
            2.0 * q.error_bound + 1e-13 * std::abs(a.value) + 1e-16);
    }
  }
}

TEST_CASE("cut limits carry the optical half-residue") {
  const double m = 1.0;
  for (double E : {0.5, 2.0, 10.0}) {
    const Complex z_up(E, 0.0);
    const auto a = sepdyn::loop_I(yam(), z_up);
    const auto q = sepdyn::loop_I(reg2(), z_up);
    CAPTURE(E);
    CHECK(std::abs(q.value - a.value) <= 5.0 * q.error_bound + 1e-12);

    // Im I(E + i0) = -m sqrt(m E) phi(k_on)^2 / (4 pi).
    const double kon = std::sqrt(m * E);
    const double phi2 = std::pow(FormFactor::yamaguchi(1.0)(kon), 2);
    const double im_expect = -m * kon * phi2 / (4.0 * kPi);
    CHECK(a.value.imag() == doctest::Approx(im_expect).epsilon(1e-12));
    CHECK(q.value.imag() ==
          doctest::Approx(im_expect).epsilon(1e-7));

    // The lower edge is the complex conjugate.
    const Complex z_dn(E, -0.0);
    const auto a2 = sepdyn::loop_I(yam(), z_dn);
    CHECK(a2.value.real() == doctest::Approx(a.value.real()).epsilon(1e-14));
    CHECK(a2.value.imag() ==
          doctest::Approx(-a.value.imag()).epsilon(1e-14));
  }
}

TEST_CASE("weighted kernel closed forms") {
  const auto u = unit_ff();
  CHECK(sepdyn::weighted_K(u, Complex(-1.0, 0.0)).value.real() ==
        doctest::Approx(-1.0 / (4.0 * kPi)).epsilon(1e-14));
  CHECK(sepdyn::weighted_K(u, Complex(-4.0, 0.0)).value.real() ==
        doctest::Approx(-1.0 / (8.0 * kPi)).epsilon(1e-14));

  // Upper-edge limit is purely imaginary for the unit form factor.
  const auto kc = sepdyn::weighted_K(u, Complex(4.0, 0.0));
  CHECK(std::abs(kc.value.real()) < 1e-16);
  CHECK(kc.value.imag() ==
        doctest::Approx(-1.0 / (8.0 * kPi)).epsilon(1e-13));

  // pure_power at alpha = 0 must reduce to the unit closed form.
  for (double x : {-0.3, -1.0, -7.5}) {
    const Complex z(x, 0.0);
    CHECK(std::abs(sepdyn::weighted_K(pure(0.0), z).value -
                   sepdyn::weighted_K(u, z).value) < 1e-15);
  }

  // alpha = 1/4 against the independent log-grid oracle.
  const auto kp = sepdyn::weighted_K(pure(0.25), Complex(-1.0, 0.0));
  CHECK(kp.method == LoopMethod::analytic);
  const Complex oracle = log_gl([](double k) {
    return Complex(std::pow(k, -0.5), 0.0) / (-1.0 - k * k);
  });
  CHECK(kp.value.real() == doctest::Approx(oracle.real()).epsilon(1e-11));

  CHECK_THROWS_AS(sepdyn::weighted_K(u, Complex(0.0, 0.0)),
                  sepdyn::DomainError);
  CHECK_THROWS_AS(sepdyn::weighted_K(pure(0.5), Complex(-1.0, 0.0)),
                  sepdyn::DivergenceError);
  CHECK_THROWS_AS(sepdyn::weighted_K(pure(0.75), Complex(-1.0, 0.0)),
                  sepdyn::DivergenceError);
}

TEST_CASE("subtracted kernel") {
  // Identically zero whenever |phi|^2 equals the bare power.
  const auto mz = sepdyn::subtracted_M(unit_ff(), Complex(-3.0, 0.0));
  CHECK(mz.value == Complex(0.0, 0.0));
  CHECK(mz.error_bound == 0.0);
  CHECK(mz.method == LoopMethod::analytic);
  CHECK(sepdyn::subtracted_M(pure(0.25), Complex(-1.0, 0.5)).value ==
        Complex(0.0, 0.0));

  CHECK_THROWS_AS(sepdyn::subtracted_M(yam(), Complex(-1.0, 0.0)),
                  sepdyn::UnsupportedRegimeError);
  CHECK_THROWS_AS(
      sepdyn::subtracted_M(reg(0.5, 1.0), Complex(-1.0, 0.0)),
      sepdyn::UnsupportedRegimeError);

  // Regulated kind against the independent oracle (same stable algebra for
  // the subtracted difference, different discretization).
  const auto m1 = sepdyn::subtracted_M(reg(0.25, 1.0), Complex(-1.0, 0.0));
  const Complex oracle = log_gl([](double k) {
    const double diff =
        std::pow(k, 1.5) * std::expm1(-0.25 * std::log1p(1.0 / (k * k)));
    return Complex(diff, 0.0) / (-1.0 - k * k);
  });
  CHECK(m1.method == LoopMethod::quadrature);
  CHECK(std::abs(m1.value - oracle) <= 10.0 * m1.error_bound + 1e-11);

  // M(0) is finite (used to convert tail parameters to couplings).
  CHECK_NOTHROW(sepdyn::subtracted_M(reg(0.25, 1.0), Complex(0.0, 0.0)));
  // Negative alpha works too.
  const auto m2 = sepdyn::subtracted_M(reg(-0.3, 2.0), Complex(-2.0, 0.0));
  const Complex oracle2 = log_gl([](double k) {
    const double diff =
        std::pow(k, 2.6) * std::expm1(0.3 * std::log1p(4.0 / (k * k)));
    return Complex(diff, 0.0) / (-2.0 - k * k);
  });
  CHECK(std::abs(m2.value - oracle2) <= 10.0 * m2.error_bound + 1e-11);
}

TEST_CASE("weighted kernel dual route through the subtracted kernel") {
  // z K(z) = z K_pure(z) + M(z) - M(0) exactly, for the regulated kind.
  const auto model = reg(0.25, 1.0);
  const auto model_p = pure(0.25);
  for (double x : {-0.7, -3.0, -1e6}) {
    const Complex z(x, 0.0);
    const auto k_direct = sepdyn::weighted_K(model, z);
    const auto k_pure = sepdyn::weighted_K(model_p, z);
    const auto m_z = sepdyn::subtracted_M(model, z);
    const auto m_0 = sepdyn::subtracted_M(model, Complex(0.0, 0.0));
    const Complex rhs =
        (z * k_pure.value + m_z.value - m_0.value) / z;
    const double budget = 10.0 * (k_direct.error_bound +
                                  (m_z.error_bound + m_0.error_bound) /
                                      std::abs(x)) +
                          1e-13 * std::abs(k_direct.value);
    CAPTURE(x);
    CHECK(std::abs(k_direct.value - rhs) <= budget);
  }
}

TEST_CASE("two-resolvent loop") {
  const auto u = unit_ff();
  const auto j = sepdyn::resolvent_J(u, Complex(-1.0, 0.0),
                                     Complex(-4.0, 0.0));
  CHECK(j.value.real() == doctest::Approx(1.0 / (12.0 * kPi)).epsilon(1e-14));
  CHECK(j.method == LoopMethod::analytic);

  // Symmetry.
  const auto jswap = sepdyn::resolvent_J(u, Complex(-4.0, 0.0),
                                         Complex(-1.0, 0.0));
  CHECK(j.value == jswap.value);

  // Degenerate and doubly-on-cut arguments are rejected.
  CHECK_THROWS_AS(
      sepdyn::resolvent_J(u, Complex(-1.0, 0.0), Complex(-1.0, 0.0)),
      sepdyn::DegenerateArgumentsError);
  CHECK_THROWS_AS(
      sepdyn::resolvent_J(u, Complex(1.0, 0.0), Complex(2.0, 0.0)),
      sepdyn::DomainError);

  // J(0, z) = -K(z).
  const auto j0 = sepdyn::resolvent_J(u, Complex(0.0, 0.0),
                                      Complex(-4.0, 0.0));
  CHECK(j0.value.real() ==
        doctest::Approx(-sepdyn::weighted_K(u, Complex(-4.0, 0.0))
                             .value.real())
            .epsilon(1e-14));
}

TEST_CASE("two-resolvent loop dual routes") {
  // J(z1, z2) = (z1 K(z1) - z2 K(z2)) / (z2 - z1) for every kind.
  const Complex z1(-1.3, 0.0), z2(-5.0, 0.0);
  const SeparableModel models[] = {unit_ff(), pure(0.25), reg(0.25, 1.0),
                                   reg(-0.3, 2.0)};
  for (const auto& model : models) {
    const auto jj = sepdyn::resolvent_J(model, z1, z2);
    const auto k1 = sepdyn::weighted_K(model, z1);
    const auto k2 = sepdyn::weighted_K(model, z2);
    const Complex rhs = (z1 * k1.value - z2 * k2.value) / (z2 - z1);
    const double budget =
        10.0 * (jj.error_bound +
                (std::abs(z1) * k1.error_bound +
                 std::abs(z2) * k2.error_bound) /
                    std::abs(z2 - z1)) +
        1e-12 * std::abs(jj.value);
    CAPTURE(static_cast<int>(model.phi.kind()));
    CHECK(std::abs(jj.value - rhs) <= budget);
  }

  // Hamiltonian kinds: J = (I(z1) - I(z2)) / (z2 - z1).
  for (const auto& model : {yam(), reg2(), reg(0.75, 1.5)}) {
    const auto jj = sepdyn::resolvent_J(model, z1, z2);
    const auto i1 = sepdyn::loop_I(model, z1);
    const auto i2 = sepdyn::loop_I(model, z2);
    const Complex rhs = (i1.value - i2.value) / (z2 - z1);
    const double budget =
        10.0 * (jj.error_bound +
                (i1.error_bound + i2.error_bound) / std::abs(z1 - z2)) +
        1e-12 * std::abs(jj.value);
    CHECK(std::abs(jj.value - rhs) <= budget);
  }

  // Complex arguments against the independent oracle (regulated kind).
  const Complex w1(-2.0, 1.5), w2(0.7, -2.0);
  const auto jq = sepdyn::resolvent_J(reg(0.25, 1.0), w1, w2);
  const Complex oracle = log_gl([&](double k) {
    const double phi2 = std::pow(k * k + 1.0, -0.25);
    const Complex e(k * k, 0.0);
    return k * k * phi2 / ((w1 - e) * (w2 - e));
  });
  CHECK(std::abs(jq.value - oracle) <= 10.0 * jq.error_bound + 1e-11);

  // One argument on the cut: compare the regulated quadrature against the
  // yamaguchi closed form through the I-difference route.
  const Complex zc(2.0, 0.0), zo(-2.0, 0.0);
  const auto jcut_q = sepdyn::resolvent_J(reg2(), zc, zo);
  const auto jcut_a = sepdyn::resolvent_J(yam(), zc, zo);
  CHECK(std::abs(jcut_q.value - jcut_a.value) <=
        10.0 * (jcut_q.error_bound + jcut_a.error_bound) + 1e-11);
}

TEST_CASE("second moment") {
  const auto u = unit_ff();
  CHECK(sepdyn::second_moment_D(u, Complex(-1.0, 0.0)).value.real() ==
        doctest::Approx(1.0 / (8.0 * kPi)).epsilon(1e-14));
  CHECK(sepdyn::second_moment_D(u, Complex(-4.0, 0.0)).value.real() ==
        doctest::Approx(1.0 / (16.0 * kPi)).epsilon(1e-14));

  CHECK_THROWS_AS(sepdyn::second_moment_D(u, Complex(2.0, 0.0)),
                  sepdyn::DomainError);
  CHECK_THROWS_AS(sepdyn::second_moment_D(u, Complex(2.0, -0.0)),
                  sepdyn::DomainError);
  CHECK_THROWS_AS(sepdyn::second_moment_D(u, Complex(0.0, 0.0)),
                  sepdyn::DomainError);

  // Quadrature matches the yamaguchi closed form.
  for (const Complex z : {Complex(-1.0, 0.0), Complex(-3.0, 2.0)}) {
    const auto dq = sepdyn::second_moment_D(reg2(), z);
    const auto da = sepdyn::second_moment_D(yam(), z);
    CHECK(std::abs(dq.value - da.value) <=
          5.0 * dq.error_bound + 1e-12 * std::abs(da.value));
  }

  // pure_power closed form against the oracle.
  const auto dp = sepdyn::second_moment_D(pure(0.25), Complex(-2.0, 0.0));
  const Complex oracle = log_gl([](double k) {
    const Complex d(-2.0 - k * k, 0.0);
    return Complex(k * k * std::pow(k, -0.5), 0.0) / (d * d);
  });
  CHECK(dp.method == LoopMethod::analytic);
  CHECK(dp.value.real() == doctest::Approx(oracle.real()).epsilon(1e-11));

  // Positivity and reality on the negative axis, every kind.
  const SeparableModel all[] = {u, pure(0.25), pure(-0.3), reg(0.25, 1.0),
                                yam(), reg2()};
  for (const auto& model : all) {
    const auto d = sepdyn::second_moment_D(model, Complex(-2.5, 0.0));
    CHECK(d.value.real() > 0.0);
    CHECK(std::abs(d.value.imag()) <= 1e-14 * d.value.real());
  }

  // Coincident-argument limit of the two-resolvent loop.
  for (const auto& model : {u, reg(0.25, 1.0)}) {
    const Complex z(-2.0, 0.0);
    const double h = 1e-3;
    const auto jm = sepdyn::resolvent_J(model, z - h, z);
    const auto jp = sepdyn::resolvent_J(model, z, z + h);
    const auto d = sepdyn::second_moment_D(model, z);
    const Complex avg = 0.5 * (jm.value + jp.value);
    CHECK(std::abs(avg - d.value) <=
          1e-5 * std::abs(d.value) +
              10.0 * (jm.error_bound + jp.error_bound + d.error_bound));
  }
}

TEST_CASE("loop values are real on the negative axis") {
  const SeparableModel all[] = {unit_ff(), pure(0.25),  pure(-0.3),
                                reg(0.25, 1.0), reg(-0.3, 2.0), yam(),
                                reg2(),    reg(0.75, 1.5)};
  for (const auto& model : all) {
    const Complex z(-1.7, 0.0);
    const auto k = sepdyn::weighted_K(model, z);
    CHECK(std::abs(k.value.imag()) <= 1e-14 * std::abs(k.value.real()));
    if (model.phi.regime() == sepdyn::Regime::hamiltonian) {
      const auto i = sepdyn::loop_I(model, z);
      CHECK(std::abs(i.value.imag()) <= 1e-14 * std::abs(i.value.real()));
    }
  }
}
