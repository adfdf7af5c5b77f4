#include "sepdyn/asymptotics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "sepdyn/errors.hpp"

namespace sepdyn {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require_open_range(double alpha) {
  if (!(alpha > -0.5) || !(alpha < 0.5) || !std::isfinite(alpha))
    throw DomainError("tail exponent must lie in (-1/2, 1/2)");
}

Complex phase(double turns_of_pi) {
  return std::polar(1.0, turns_of_pi * kPi);
}

// Solve the symmetric positive system of the relative-weighted LS problem
// for up to three power columns; returns coefficients and rms residual.
template <int N>
std::array<double, N + 1> solve_power_ls(const std::vector<double>& x,
                                         const std::vector<double>& y,
                                         const std::array<double, N>& expo) {
  if (x.size() != y.size())
    throw DomainError("power fit needs matching sample arrays");
  if (static_cast<int>(x.size()) < N + 1)
    throw DomainError("power fit needs more samples than coefficients");
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      if (expo[i] == expo[j])
        throw DegenerateArgumentsError("power-fit exponents must differ");

  double ata[N][N] = {};
  double atb[N] = {};
  for (size_t s = 0; s < x.size(); ++s) {
    if (!(x[s] > 0.0)) throw DomainError("power fit needs positive abscissae");
    const double w = 1.0 / std::max(std::abs(y[s]), 1e-300);  // relative
    double row[N];
    for (int i = 0; i < N; ++i) row[i] = w * std::pow(x[s], expo[i]);
    const double rhs = w * y[s];
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) ata[i][j] += row[i] * row[j];
      atb[i] += row[i] * rhs;
    }
  }

  // Gaussian elimination with partial pivoting on the tiny normal system.
  double a[N][N + 1];
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) a[i][j] = ata[i][j];
    a[i][N] = atb[i];
  }
  for (int col = 0; col < N; ++col) {
    int pivot = col;
    for (int r = col + 1; r < N; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0)
      throw DegenerateArgumentsError("power-fit normal system is singular");
    if (pivot != col)
      for (int j = 0; j <= N; ++j) std::swap(a[pivot][j], a[col][j]);
    for (int r = 0; r < N; ++r) {
      if (r == col) continue;
      const double factor = a[r][col] / a[col][col];
      for (int j = col; j <= N; ++j) a[r][j] -= factor * a[col][j];
    }
  }

  std::array<double, N + 1> out{};
  for (int i = 0; i < N; ++i) out[i] = a[i][N] / a[i][i];

  double ss = 0.0;
  for (size_t s = 0; s < x.size(); ++s) {
    double fit = 0.0;
    for (int i = 0; i < N; ++i) fit += out[i] * std::pow(x[s], expo[i]);
    const double r = (y[s] - fit) / std::max(std::abs(y[s]), 1e-300);
    ss += r * r;
  }
  out[N] = std::sqrt(ss / static_cast<double>(x.size()));
  return out;
}

struct TailBasis {
  double e1, e2, e3, e4;
};

// Successive tail exponents per regime. The entries beyond the reported
// coefficients act as guard columns: fitting them absorbs the next-order
// truncation term that would otherwise bias the reported ones.
TailBasis basis_for(const SeparableModel& model) {
  const Regime regime = model.phi.regime();
  if (regime == Regime::log_marginal)
    throw UnsupportedRegimeError(
        "marginal tails are logarithmic; no power basis fits them");
  if (regime == Regime::hamiltonian) return {0.0, -0.5, -1.0, -1.5};
  const double alpha = model.phi.tail_exponent();
  return {alpha - 0.5, 2.0 * alpha - 1.0, 3.0 * alpha - 1.5,
          4.0 * alpha - 2.0};
}

std::vector<double> sample_axis(const SeparableModel& model,
                                const std::vector<double>& xs) {
  std::vector<double> ys;
  ys.reserve(xs.size());
  for (const double x : xs)
    ys.push_back(t_of(model, Complex(-x, 0.0)).real());
  return ys;
}

}  // namespace

void InteractionKernel::validate() const {
  require_open_range(alpha);
  const auto finite = [](Complex c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  };
  if (!finite(a1) || !finite(a2) || (a3 && !finite(*a3)))
    throw DomainError("kernel coefficients must be finite");
}

// ===========================================================================
// power-basis least squares
// ===========================================================================

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("need 0 < lo < hi");
  if (n < 2) throw DomainError("need at least two grid points");
  std::vector<double> xs(n);
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) xs[i] = lo * std::exp(step * i);
  xs.back() = hi;
  return xs;
}

TailFit fit_two_powers(const std::vector<double>& x,
                       const std::vector<double>& y, double e1, double e2) {
  const auto c = solve_power_ls<2>(x, y, {e1, e2});
  return {c[0], c[1], c[2]};
}

TailFit3 fit_three_powers(const std::vector<double>& x,
                          const std::vector<double>& y, double e1, double e2,
                          double e3) {
  const auto c = solve_power_ls<3>(x, y, {e1, e2, e3});
  return {c[0], c[1], c[2], c[3]};
}

double log_log_slope(const std::vector<double>& x,
                     const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DomainError("slope fit needs two matching samples or more");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(std::abs(y[i]) > 0.0))
      throw DomainError("slope fit needs positive x and nonzero y");
    const double lx = std::log(x[i]);
    const double ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(x.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TailFit tail_fit(const SeparableModel& model, int n_points, double neg_z_lo,
                 double neg_z_hi, double max_residual) {
  const TailBasis basis = basis_for(model);
  const auto xs = log_spaced(neg_z_lo, neg_z_hi, n_points);
  const TailFit3 fit = fit_three_powers(xs, sample_axis(model, xs), basis.e1,
                                        basis.e2, basis.e3);
  if (fit.residual > max_residual)
    throw AccuracyError("tail basis does not describe the sampled amplitude",
                        Complex(fit.b1, 0.0), fit.residual);
  return {fit.b1, fit.b2, fit.residual};
}

TailFit3 tail_fit3(const SeparableModel& model, int n_points, double neg_z_lo,
                   double neg_z_hi, double max_residual) {
  const TailBasis basis = basis_for(model);
  const auto xs = log_spaced(neg_z_lo, neg_z_hi, n_points);
  const auto c = solve_power_ls<4>(xs, sample_axis(model, xs),
                                   {basis.e1, basis.e2, basis.e3, basis.e4});
  const TailFit3 fit{c[0], c[1], c[2], c[4]};
  if (fit.residual > max_residual)
    throw AccuracyError("tail basis does not describe the sampled amplitude",
                        Complex(fit.b1, 0.0), fit.residual);
  return fit;
}

// ===========================================================================
// coefficient maps
// ===========================================================================

std::pair<Complex, Complex> a_from_b(double b1, double b2, double alpha) {
  require_open_range(alpha);
  const Complex a1 = Complex(0.0, -1.0) * b1 / std::tgamma(0.5 - alpha) *
                     phase(0.25 - 0.5 * alpha);
  const Complex a2 = b2 / std::tgamma(1.0 - 2.0 * alpha) * phase(-alpha);
  return {a1, a2};
}

std::pair<Complex, Complex> b_from_a(Complex a1, Complex a2, double alpha) {
  require_open_range(alpha);
  const Complex b1 = Complex(0.0, 1.0) * a1 * std::tgamma(0.5 - alpha) *
                     phase(0.5 * alpha - 0.25);
  const Complex b2 = a2 * std::tgamma(1.0 - 2.0 * alpha) * phase(alpha);
  return {b1, b2};
}

Complex a3_of(Complex a1, Complex a2, double alpha) {
  if (!(alpha < 0.5)) throw DomainError("a3 needs alpha < 1/2");
  if (a2 == Complex(0.0, 0.0)) return {0.0, 0.0};
  if (a1 == Complex(0.0, 0.0))
    throw DegenerateArgumentsError(
        "third-order coefficient undefined for a vanishing leading term");
  const double g12 = std::tgamma(1.0 - 2.0 * alpha);
  return (a2 * a2 / a1) * (g12 * g12) /
         (std::tgamma(0.5 - alpha) * std::tgamma(1.5 - 3.0 * alpha));
}

Complex b3_from_a3(Complex a3, double alpha) {
  require_open_range(alpha);
  return a3 * std::tgamma(1.5 - 3.0 * alpha) * phase(1.5 * alpha - 0.25);
}

// ===========================================================================
// Laplace bridge
// ===========================================================================

namespace {

// i * Int_0^inf e^{i z tau} tau^p dtau, numerically: series head on
// [0, tau0], adaptive quadrature on the shifted tail.
Complex laplace_power_numeric(double p, Complex z) {
  const double tau0 = std::min(1.0, 1.0 / std::abs(z));

  // Head: expand the exponential; |z tau0| <= 1 keeps the series fast.
  Complex head(0.0, 0.0);
  Complex zn(1.0, 0.0);  // (i z)^n / n!
  for (int n = 0; n < 200; ++n) {
    const Complex term = zn * std::pow(tau0, p + n + 1) / (p + n + 1.0);
    head += term;
    if (std::abs(term) < 1e-18 * std::abs(head) && n > 2) break;
    zn *= Complex(0.0, 1.0) * z / static_cast<double>(n + 1);
  }

  QuadratureSpec spec;
  spec.rel_tol = 1e-12;
  spec.abs_tol = 1e-15;
  spec.tail_start = std::max(40.0, 45.0 / z.imag());
  const auto g = [p, z, tau0](double u) {
    const double tau = tau0 + u;
    return std::pow(tau, p) * std::exp(Complex(0.0, 1.0) * z * tau);
  };
  const Complex tail = integrate_semiinf(g, spec, Measure::plain).value;

  return Complex(0.0, 1.0) * (head + tail);
}

}  // namespace

Complex laplace_numeric(const InteractionKernel& kernel, Complex z) {
  kernel.validate();
  if (!(z.imag() > 0.0))
    throw DomainError("Laplace transform needs Im z > 0 for convergence");
  Complex out(0.0, 0.0);
  if (kernel.a1 != Complex(0.0, 0.0))
    out += kernel.a1 * laplace_power_numeric(-kernel.alpha - 0.5, z);
  if (kernel.a2 != Complex(0.0, 0.0))
    out += kernel.a2 * laplace_power_numeric(-2.0 * kernel.alpha, z);
  if (kernel.a3 && *kernel.a3 != Complex(0.0, 0.0))
    out += *kernel.a3 * laplace_power_numeric(0.5 - 3.0 * kernel.alpha, z);
  return out;
}

Complex tail_closed_form(double b1, double b2, double alpha, Complex z) {
  require_open_range(alpha);
  return b1 * principal_power(-z, alpha - 0.5) +
         b2 * principal_power(-z, 2.0 * alpha - 1.0);
}

double laplace_check(const InteractionKernel& kernel, Complex z) {
  auto [b1, b2] = b_from_a(kernel.a1, kernel.a2, kernel.alpha);
  Complex closed = b1 * principal_power(-z, kernel.alpha - 0.5) +
                   b2 * principal_power(-z, 2.0 * kernel.alpha - 1.0);
  if (kernel.a3)
    closed += b3_from_a3(*kernel.a3, kernel.alpha) *
              principal_power(-z, 3.0 * kernel.alpha - 1.5);
  const Complex numeric = laplace_numeric(kernel, z);
  return std::abs(numeric - closed) / std::max(std::abs(closed), 1e-300);
}

// ===========================================================================
// marginal logarithmic tail
// ===========================================================================

double marginal_b1(double mu) {
  if (!(mu > 0.0)) throw DomainError("reduced mass must be positive");
  return -2.0 * kPi * kPi / mu;
}

Complex marginal_kernel_f1(double b1, double b2, Complex z) {
  if (!(std::abs(z) > 1.0))
    throw DomainError("logarithmic tail needs |z| > 1");
  const Complex lg = std::log(-z);
  if (lg == Complex(0.0, 0.0)) throw DomainError("log(-z) vanished");
  return b1 / lg + b2 / (lg * lg);
}

}  // namespace sepdyn
