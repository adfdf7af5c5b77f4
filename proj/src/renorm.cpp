#include "sepdyn/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "sepdyn/errors.hpp"
#include "sepdyn/tmatrix.hpp"

namespace sepdyn {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require_mass(double m) {
  if (!(m > 0.0) || !std::isfinite(m))
    throw DomainError("mass must be positive and finite");
}

void require_off_cut(Complex z) {
  if (z.imag() == 0.0 && z.real() > 0.0)
    throw DomainError("regulated amplitude needs z off the scattering cut");
}

QuadratureSpec regulated_spec(const CutoffScheme& scheme, double m,
                              Complex z) {
  QuadratureSpec spec;
  spec.rel_tol = 1e-12;
  spec.abs_tol = 1e-14;
  spec.tail_start = std::max({40.0, 8.0 * std::sqrt(m * std::abs(z)),
                              8.0 * scheme.lambda});
  return spec;
}

// Int_0^inf dk k^2 f^2(k) / (z - E_k) * (1 / 2 pi^2); linearly divergent
// counterpart of the subtraction integral.
Complex loop_bare(const CutoffScheme& scheme, double m, Complex z) {
  if (z == Complex(0.0, 0.0))  // branch point: loop collapses to -theta
    return {-theta_integral(scheme, m), 0.0};
  if (scheme.kind == CutoffKind::sharp) {
    // m/(2 pi^2) * (kappa * atan(Lambda/kappa) - Lambda), kappa = sqrt(-m z).
    const Complex kappa = principal_power(-(m * z), 0.5);
    const Complex value =
        kappa * std::atan(scheme.lambda / kappa) - scheme.lambda;
    return m / (2.0 * kPi * kPi) * value;
  }
  const QuadratureSpec spec = regulated_spec(scheme, m, z);
  const auto integrand = [&scheme, m, z](double k) {
    const double f = scheme.regulator(k);
    return k * k * f * f / (z - k * k / m);
  };
  return integrate_semiinf(integrand, spec, Measure::radial3d).value;
}

// Int_0^inf dk k^2 f^2(k) / ((z - E_k) E_k) * (1 / 2 pi^2); convergent
// weighted loop entering the renormalized form.
Complex loop_weighted(const CutoffScheme& scheme, double m, Complex z) {
  if (z == Complex(0.0, 0.0))
    throw DivergenceError("weighted regulated loop diverges at z = 0");
  if (scheme.kind == CutoffKind::sharp) {
    // -m^2/(2 pi^2) * atan(Lambda/kappa) / kappa.
    const Complex kappa = principal_power(-(m * z), 0.5);
    return -m * m / (2.0 * kPi * kPi) * std::atan(scheme.lambda / kappa) /
           kappa;
  }
  const QuadratureSpec spec = regulated_spec(scheme, m, z);
  const auto integrand = [&scheme, m, z](double k) {
    const double f = scheme.regulator(k);
    return m * f * f / (z - k * k / m);  // k^2/E_k cancelled analytically
  };
  return integrate_semiinf(integrand, spec, Measure::radial3d).value;
}

Complex invert_denominator(Complex den, double scale, Complex z) {
  if (std::abs(den) < 1e-12 * scale)
    throw PoleError("regulated amplitude pole at the requested energy", z);
  return 1.0 / den;
}

}  // namespace

const char* cutoff_kind_name(CutoffKind kind) {
  switch (kind) {
    case CutoffKind::sharp:
      return "sharp";
    case CutoffKind::gaussian:
      return "gaussian";
    case CutoffKind::dipole:
      return "dipole";
  }
  return "unknown";
}

double CutoffScheme::regulator(double p) const {
  validate();
  if (p < 0.0) throw DomainError("momentum must be non-negative");
  switch (kind) {
    case CutoffKind::sharp:
      return p <= lambda ? 1.0 : 0.0;
    case CutoffKind::gaussian:
      return std::exp(-p * p / (2.0 * lambda * lambda));
    case CutoffKind::dipole:
      return lambda * lambda / (p * p + lambda * lambda);
  }
  return 0.0;
}

void CutoffScheme::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DomainError("cutoff momentum must be positive and finite");
}

double theta_integral(const CutoffScheme& scheme, double m) {
  scheme.validate();
  require_mass(m);
  const double prefactor = m / (2.0 * kPi * kPi);
  switch (scheme.kind) {
    case CutoffKind::sharp:
      return prefactor * scheme.lambda;  // Int_0^L dk = L
    case CutoffKind::gaussian:
      // Int exp(-k^2/L^2) dk = L sqrt(pi)/2
      return prefactor * scheme.lambda * std::sqrt(kPi) / 2.0;
    case CutoffKind::dipole:
      // Int L^4/(k^2+L^2)^2 dk = pi L / 4
      return prefactor * scheme.lambda * kPi / 4.0;
  }
  throw DomainError("unreachable cutoff kind");
}

double c0_from_cr(double c_r, const CutoffScheme& scheme, double m) {
  scheme.validate();
  require_mass(m);
  if (!(c_r != 0.0) || !std::isfinite(c_r))
    throw DomainError("renormalized coupling must be nonzero and finite");
  const double theta = theta_integral(scheme, m);
  const double inv = 1.0 / c_r - theta;
  const double scale = std::abs(1.0 / c_r) + std::abs(theta);
  if (std::abs(inv) < 1e-12 * scale)
    throw SingularCouplingError(
        "subtraction integral cancels 1/C_R: bare coupling diverges at this "
        "cutoff");
  return 1.0 / inv;
}

Complex t_regularized_c0(const CutoffScheme& scheme, double c0, double m,
                         Complex z) {
  scheme.validate();
  require_mass(m);
  require_off_cut(z);
  if (c0 == 0.0) return {0.0, 0.0};
  const Complex loop = loop_bare(scheme, m, z);
  const Complex den = 1.0 / c0 - loop;
  const double scale = std::abs(1.0 / c0) + std::abs(loop);
  return invert_denominator(den, scale, z);
}

Complex t_regularized_cr(const CutoffScheme& scheme, double c_r, double m,
                         Complex z) {
  scheme.validate();
  require_mass(m);
  require_off_cut(z);
  if (c_r == 0.0) return {0.0, 0.0};
  if (z == Complex(0.0, 0.0)) return {c_r, 0.0};  // renormalization condition
  const Complex loop = z * loop_weighted(scheme, m, z);
  const Complex den = 1.0 / c_r - loop;
  const double scale = std::abs(1.0 / c_r) + std::abs(loop);
  return invert_denominator(den, scale, z);
}

std::vector<SweepRow> cutoff_sweep(double c_r, double m, Complex z,
                                   const std::vector<double>& lambdas,
                                   CutoffKind kind) {
  require_mass(m);
  if (lambdas.size() < 2)
    throw DomainError("cutoff sweep needs at least two cutoffs");
  if (!std::is_sorted(lambdas.begin(), lambdas.end()) ||
      std::adjacent_find(lambdas.begin(), lambdas.end()) != lambdas.end())
    throw DomainError("cutoff list must be strictly increasing");

  const Complex reference = t_eft_lo(c_r, m, z);
  std::vector<SweepRow> rows;
  rows.reserve(lambdas.size());
  for (const double lambda : lambdas) {
    SweepRow row;
    row.lambda = lambda;
    try {
      row.t = t_regularized_cr({kind, lambda}, c_r, m, z);
      row.abs_err = std::abs(row.t - reference);
      row.rel_err = row.abs_err / std::abs(reference);
    } catch (const PoleError&) {
      row.pole = true;
    }
    rows.push_back(row);
  }
  return rows;
}

double sweep_decay_exponent(const std::vector<SweepRow>& rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const SweepRow& r : rows) {
    if (r.pole || !(r.abs_err > 0.0)) continue;
    const double x = std::log(r.lambda);
    const double y = std::log(r.abs_err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2)
    throw DomainError("decay-exponent fit needs at least two clean rows");
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -slope;  // error ~ Lambda^(-exponent)
}

double scattering_length(double c_r, double m) {
  require_mass(m);
  return m * c_r / (4.0 * kPi);
}

double cr_from_a(double a, double m) {
  require_mass(m);
  return 4.0 * kPi * a / m;
}

}  // namespace sepdyn
