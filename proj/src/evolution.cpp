#include "sepdyn/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "sepdyn/tmatrix.hpp"

namespace sepdyn {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPiSq = 2.0 * kPi * kPi;

// Largest tolerable exponent of the contour envelope e^{y (t - t0)}; beyond
// this the quadrature would have to resolve cancellations below the double
// significand.
constexpr double kMaxEnvelopeExponent = 40.0;

void require_interval(double t, double t0, double y, const char* who) {
  if (!(t >= t0))
    throw DomainError(std::string(who) + ": need t >= t0");
  if (y * (t - t0) > kMaxEnvelopeExponent)
    throw DomainError(std::string(who) +
                      ": contour height times interval exceeds " +
                      "the significand budget; lower y");
}

// ===========================================================================
// side sums: one factor phi psi e^{+-i E tau} / (z - E) of the integrand,
// pre-reduced to amplitudes so each contour node costs one sweep
// ===========================================================================

struct Side {
  std::vector<double> energy;
  std::vector<Complex> amp;
  double x_cut = 0.0;  // energy below which all but ~3e-4 of |amp| lives
};

double mass_cut_energy(const std::vector<double>& energy,
                       const std::vector<Complex>& amp) {
  double total = 0.0;
  for (const Complex& a : amp) total += std::abs(a);
  if (total <= 0.0) return 0.0;
  const double budget = 3e-4 * total;
  double tail = 0.0;
  for (std::size_t j = amp.size(); j-- > 0;) {
    tail += std::abs(amp[j]);
    if (tail > budget) return energy[j];
  }
  return energy.empty() ? 0.0 : energy.front();
}

// bra sides conjugate the state and carry e^{+i E tau}; ket sides carry
// e^{-i E tau}.
Side state_side(const SeparableModel& model, const RadialState& s, double tau,
                bool bra) {
  Side side;
  const std::size_t n = s.size();
  side.energy.resize(n);
  side.amp.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = s.grid.k[j];
    const double e = model.energy_of(k);
    const double f = model.phi(k);
    if (!std::isfinite(f))
      throw DomainError("state_side: form factor not finite on the grid");
    const double wj = s.grid.w[j] * k * k / kTwoPiSq;
    const Complex v = bra ? std::conj(s.values[j]) : s.values[j];
    const Complex phase = std::polar(1.0, bra ? e * tau : -e * tau);
    side.energy[j] = e;
    side.amp[j] = wj * f * v * phase;
  }
  side.x_cut = mass_cut_energy(side.energy, side.amp);
  return side;
}

Side point_side(const SeparableModel& model, double p, double tau, bool bra) {
  if (!(p >= 0.0) || !std::isfinite(p))
    throw DomainError("point_side: momentum must be finite and >= 0");
  const double f = model.phi(p);
  if (!std::isfinite(f))
    throw DomainError("point_side: form factor singular at this momentum");
  const double e = model.energy_of(p);
  Side side;
  side.energy = {e};
  side.amp = {f * std::polar(1.0, bra ? e * tau : -e * tau)};
  side.x_cut = e;
  return side;
}

Complex side_dot(const Side& s, double x, double y) {
  const std::size_t n = s.energy.size();
  const double* e = s.energy.data();
  const Complex* a = s.amp.data();
  double re = 0.0, im = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = x - e[j];
    const double inv = 1.0 / (dx * dx + y * y);
    const double gr = dx * inv;   // Re 1/(z - E)
    const double gi = -y * inv;   // Im 1/(z - E)
    const double ar = a[j].real(), ai = a[j].imag();
    re += ar * gr - ai * gi;
    im += ar * gi + ai * gr;
  }
  return {re, im};
}

// (i/2pi) Int dx t(z) e^{-i z (t-t0)} A(z) B(z) along z = x + i y.
Complex element_from_sides(const EvolutionKernel& kernel, const Side& a,
                           const Side& b, double t, double t0) {
  const double dt = t - t0;
  const double x_core = 1.05 * std::max(a.x_cut, b.x_cut) + 10.0;
  const SeparableModel& model = kernel.model;
  auto f = [&](Complex z) {
    const Complex tz = t_of(model, z);
    const Complex envelope =
        std::exp(Complex(z.imag() * dt, -z.real() * dt));
    return tz * envelope * side_dot(a, z.real(), z.imag()) *
           side_dot(b, z.real(), z.imag());
  };
  return contour_line_integral(f, t, t0, kernel.spec, x_core, kernel.y).value;
}

Complex state_pair_element(const EvolutionKernel& kernel,
                           const RadialState& bra, const RadialState& ket,
                           double t, double t0) {
  if (t == t0) return {0.0, 0.0};
  require_interval(t, t0, kernel.y, "u_state_element");
  const Side a = state_side(kernel.model, bra, t, true);
  const Side b = state_side(kernel.model, ket, t0, false);
  return element_from_sides(kernel, a, b, t, t0);
}

double grid_weight(const RadialGrid& g, std::size_t i) {
  return g.w[i] * g.k[i] * g.k[i] / kTwoPiSq;
}

Complex grid_dot(const RadialGrid& g, const std::vector<Complex>& a,
                 const std::vector<Complex>& b) {
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < g.size(); ++i)
    acc += grid_weight(g, i) * std::conj(a[i]) * b[i];
  return acc;
}

void require_same_grid(const RadialGrid& a, const RadialGrid& b,
                       const char* who) {
  if (a.k == b.k && a.w == b.w) return;
  throw DomainError(std::string(who) + ": states must share one grid");
}

// ===========================================================================
// shared contour amplitudes: one grid serves every state of a basis, so the
// per-node factors w t(z) e^{-i z dt} S(z) can be reused across states and
// across the quadratic (tail-closure) sums.
// ===========================================================================

struct ContourAmps {
  ContourGrid cg;
  // amp[s][i] = cg.w[i] t(z_i) e^{-i z_i (t - t0)} * pole sum of side s.
  std::vector<std::vector<Complex>> amp;
};

ContourAmps contour_amps(const EvolutionKernel& kernel,
                         const std::vector<Side>& sides, double t, double t0) {
  const SeparableModel& model = kernel.model;
  double cut = 0.0;
  for (const Side& s : sides) cut = std::max(cut, s.x_cut);
  const double x_core = 1.05 * cut + 10.0;

  ContourAmps parts;
  parts.cg = make_contour_grid(t, t0, kernel.spec, x_core, kernel.y);
  const std::size_t nn = parts.cg.x.size();
  const double y = parts.cg.y;
  const double dt = t - t0;

  std::vector<Complex> node(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    const Complex z(parts.cg.x[i], y);
    node[i] = parts.cg.w[i] * t_of(model, z) *
              std::exp(Complex(y * dt, -parts.cg.x[i] * dt));
  }
  parts.amp.reserve(sides.size());
  for (const Side& s : sides) {
    std::vector<Complex> row(nn);
    for (std::size_t i = 0; i < nn; ++i)
      row[i] = node[i] * side_dot(s, parts.cg.x[i], y);
    parts.amp.push_back(std::move(row));
  }
  return parts;
}

// sum_i amp[i] / (z_i - e): the resolvent projection of a contour leg onto
// one intermediate energy.
Complex leg_at(const ContourGrid& cg, const std::vector<Complex>& amp,
               double e) {
  const double y = cg.y;
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < cg.x.size(); ++i) {
    const double dx = cg.x[i] - e;
    const double inv = 1.0 / (dx * dx + y * y);
    const double gr = dx * inv, gi = -y * inv;
    const double ar = amp[i].real(), ai = amp[i].imag();
    re += ar * gr - ai * gi;
    im += ar * gi + ai * gr;
  }
  return {re, im};
}

// Pass 2 of the grid application: out[m] = (i/2pi) phi(k_m) e^{i E_m t}
// sum_i amp[i] / (z_i - E_m).
std::vector<Complex> project_out(const SeparableModel& model,
                                 const ContourGrid& cg,
                                 const std::vector<Complex>& amp,
                                 const RadialGrid& out_grid, double t,
                                 const char* who) {
  const Complex pref(0.0, 1.0 / (2.0 * kPi));
  std::vector<Complex> out(out_grid.size());
  for (std::size_t m = 0; m < out_grid.size(); ++m) {
    const double km = out_grid.k[m];
    const double em = model.energy_of(km);
    const double f = model.phi(km);
    if (!std::isfinite(f))
      throw DomainError(std::string(who) +
                        ": form factor not finite on the output grid");
    out[m] = pref * leg_at(cg, amp, em) * f * std::polar(1.0, em * t);
  }
  return out;
}

// Coverage [0, k_cut] of a composite panel rule is the sum of its weights.
double grid_coverage(const RadialGrid& g) {
  double total = 0.0;
  for (double w : g.w) total += w;
  return total;
}

}  // namespace

// ===========================================================================
// grids and states
// ===========================================================================

void RadialGrid::validate() const {
  if (k.empty() || k.size() != w.size())
    throw DomainError("RadialGrid: node and weight arrays must match");
  double prev = -1.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!std::isfinite(k[i]) || k[i] < 0.0 || k[i] <= prev)
      throw DomainError("RadialGrid: nodes must be strictly increasing and "
                        ">= 0");
    if (!std::isfinite(w[i]) || w[i] <= 0.0)
      throw DomainError("RadialGrid: weights must be positive");
    prev = k[i];
  }
}

void GridRequest::validate() const {
  if (!(k_max > 0.0) || !std::isfinite(k_max))
    throw DomainError("GridRequest: k_max must be positive");
  if (!(state_scale > 0.0))
    throw DomainError("GridRequest: state_scale must be positive");
  if (osc_time < 0.0 || pole_height < 0.0)
    throw DomainError("GridRequest: osc_time and pole_height must be >= 0");
  if (!(density > 0.0))
    throw DomainError("GridRequest: density must be positive");
  if (gauss_order < 2 || gauss_order > 30)
    throw DomainError("GridRequest: gauss_order out of range [2, 30]");
}

RadialGrid make_graded_grid(const GridRequest& req) {
  req.validate();
  const GaussRule& rule = gauss_legendre(req.gauss_order);
  RadialGrid grid;
  double k = 0.0;
  while (k < req.k_max) {
    const double k_eff = std::max(k, 0.25);
    double width = std::min(2.0, 0.5 * req.state_scale);
    if (req.osc_time > 0.0)
      width = std::min(width, kPi / (2.0 * req.osc_time * k_eff));
    if (req.pole_height > 0.0)
      width = std::min(width, 0.9 * req.pole_height / k_eff);
    width /= req.density;
    const double hi = std::min(k + width, req.k_max);
    const double c = 0.5 * (k + hi), h = 0.5 * (hi - k);
    for (int j = 0; j < req.gauss_order; ++j) {
      grid.k.push_back(c + h * rule.x[j]);
      grid.w.push_back(h * rule.w[j]);
    }
    if (grid.k.size() > 2000000)
      throw DomainError("make_graded_grid: request needs more than 2e6 "
                        "nodes; relax osc_time, pole_height, or density");
    k = hi;
  }
  return grid;
}

void RadialState::validate() const {
  grid.validate();
  if (values.size() != grid.size())
    throw DomainError("RadialState: values must match the grid");
  if (!(nu >= 1.0))
    throw DomainError("RadialState: nu must be >= 1");
  double norm2 = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    norm2 += grid_weight(grid, i) * std::norm(values[i]);
  if (!std::isfinite(norm2))
    throw DomainError("RadialState: norm is not finite");
}

Complex state_overlap(const RadialState& a, const RadialState& b) {
  require_same_grid(a.grid, b.grid, "state_overlap");
  return grid_dot(a.grid, a.values, b.values);
}

double state_norm(const RadialState& s) {
  return std::sqrt(std::abs(state_overlap(s, s)));
}

RadialState sample_state(const RadialGrid& grid,
                         const std::function<Complex(double)>& profile) {
  grid.validate();
  RadialState s;
  s.grid = grid;
  s.values.reserve(grid.size());
  for (double k : grid.k) s.values.push_back(profile(k));
  s.nu = 1.0;
  return s;
}

std::function<Complex(double)> gaussian_profile() {
  return [](double k) { return Complex(std::exp(-0.5 * k * k), 0.0); };
}

std::function<Complex(double)> bump_profile(double k0, double width) {
  if (!(width > 0.0)) throw DomainError("bump_profile: width must be > 0");
  return [k0, width](double k) {
    const double u = (k - k0) / width;
    const double u2 = u * u;
    if (u2 >= 1.0) return Complex(0.0, 0.0);
    return Complex(std::exp(1.0 - 1.0 / (1.0 - u2)), 0.0);
  };
}

RadialState scaled_copy(const RadialState& base, double nu) {
  base.validate();
  if (!(nu >= 1.0)) throw DomainError("scaled_copy: nu must be >= 1");
  RadialState s;
  s.grid.k.reserve(base.size());
  s.grid.w.reserve(base.size());
  s.values.reserve(base.size());
  const double amp = std::pow(nu, -1.5);
  for (std::size_t i = 0; i < base.size(); ++i) {
    s.grid.k.push_back(nu * base.grid.k[i]);
    s.grid.w.push_back(nu * base.grid.w[i]);
    s.values.push_back(amp * base.values[i]);
  }
  s.nu = base.nu * nu;
  return s;
}

// ===========================================================================
// kernel and matrix elements
// ===========================================================================

void EvolutionKernel::validate() const {
  model.validate();
  spec.validate();
  if (!(y > 0.0) || !std::isfinite(y))
    throw DomainError("EvolutionKernel: contour height y must be > 0");
}

Complex u_matrix_element(const EvolutionKernel& kernel, double p2, double p1,
                         double t, double t0) {
  kernel.validate();
  if (t == t0) return {0.0, 0.0};
  require_interval(t, t0, kernel.y, "u_matrix_element");
  const Side a = point_side(kernel.model, p2, t, true);
  const Side b = point_side(kernel.model, p1, t0, false);
  return element_from_sides(kernel, a, b, t, t0);
}

Complex u_state_element(const EvolutionKernel& kernel, const RadialState& bra,
                        const RadialState& ket, double t, double t0) {
  kernel.validate();
  bra.validate();
  ket.validate();
  return state_pair_element(kernel, bra, ket, t, t0);
}

std::vector<Complex> u_apply(const EvolutionKernel& kernel,
                             const RadialState& ket, double t, double t0,
                             const RadialGrid& out_grid) {
  kernel.validate();
  ket.validate();
  out_grid.validate();
  std::vector<Complex> out(out_grid.size(), Complex(0.0, 0.0));
  if (t == t0) return out;
  require_interval(t, t0, kernel.y, "u_apply");

  const Side b = state_side(kernel.model, ket, t0, false);
  const ContourAmps parts = contour_amps(kernel, {b}, t, t0);
  return project_out(kernel.model, parts.cg, parts.amp.front(), out_grid, t,
                     "u_apply");
}

// ===========================================================================
// diagnostics
// ===========================================================================

// Both residuals split the quadratic term's intermediate momentum line at
// the grid coverage K = sum of weights: [0, K] is summed with the grid's
// own quadrature (so the statistic responds to grid refinement), while
// (K, inf) is integrated adaptively with the two contour legs projected
// onto each intermediate energy.  The leg phases cancel in that product,
// leaving a smooth decaying integrand, so the closure adds no truncation
// scale of its own.  Without it the slow ultraviolet tail of (U - 1) on a
// zero-range model freezes both residuals near 1/K regardless of density.

double unitarity_residual(const EvolutionKernel& kernel,
                          const std::vector<RadialState>& basis, double t) {
  kernel.validate();
  if (basis.empty())
    throw DomainError("unitarity_residual: basis must be non-empty");
  for (const RadialState& s : basis) {
    s.validate();
    require_same_grid(s.grid, basis.front().grid, "unitarity_residual");
  }
  if (t == 0.0) return 0.0;
  require_interval(t, 0.0, kernel.y, "unitarity_residual");

  const SeparableModel& model = kernel.model;
  const RadialGrid& grid = basis.front().grid;
  const std::size_t ns = basis.size();

  // Ket- and bra-style pole reductions of every basis state.
  std::vector<Side> kets, bras;
  kets.reserve(ns);
  bras.reserve(ns);
  for (const RadialState& s : basis) {
    kets.push_back(state_side(model, s, 0.0, false));
    bras.push_back(state_side(model, s, t, true));
  }

  // One contour, shared by every (U - 1) application and by the closure.
  const ContourAmps parts = contour_amps(kernel, kets, t, 0.0);

  // (U - 1) s sampled on the basis grid.
  std::vector<std::vector<Complex>> dv(ns);
  for (std::size_t s = 0; s < ns; ++s)
    dv[s] = project_out(model, parts.cg, parts.amp[s], grid, t,
                        "unitarity_residual");

  // <(U-1)a | (U-1)b> restricted to k > coverage.  The e^{±i E_k t} factors
  // of the two legs cancel, so the integrand is smooth in k.
  const double k_cut = grid_coverage(grid);
  const double quad_norm = 1.0 / (4.0 * kPi * kPi);
  auto tail_dot = [&](std::size_t a, std::size_t b) -> Complex {
    auto f = [&](double s) -> Complex {
      const double k = k_cut + s;
      const double p = model.phi(k);
      const double e = model.energy_of(k);
      const Complex la = leg_at(parts.cg, parts.amp[a], e);
      const Complex lb = leg_at(parts.cg, parts.amp[b], e);
      return (k * k / kTwoPiSq) * p * p * std::conj(la) * lb;
    };
    return quad_norm * integrate_semiinf(f, kernel.spec, Measure::plain).value;
  };

  double worst = 0.0;
  for (std::size_t a = 0; a < ns; ++a) {
    for (std::size_t b = a; b < ns; ++b) {
      const Complex m_ab =
          element_from_sides(kernel, bras[a], kets[b], t, 0.0);
      const Complex m_ba =
          element_from_sides(kernel, bras[b], kets[a], t, 0.0);
      const Complex dev = m_ab + std::conj(m_ba) +
                          grid_dot(grid, dv[a], dv[b]) + tail_dot(a, b);
      worst = std::max(worst, std::abs(dev));
    }
  }
  return worst;
}

double composition_residual(const EvolutionKernel& kernel,
                            const RadialState& a, const RadialState& b,
                            double t, double tp, double t0) {
  kernel.validate();
  a.validate();
  b.validate();
  require_same_grid(a.grid, b.grid, "composition_residual");
  if (!(t >= tp && tp >= t0))
    throw DomainError("composition_residual: need t >= t' >= t0");

  const Complex direct = state_pair_element(kernel, a, b, t, t0);

  // Step U(t', t0) b onto the state grid, so the intermediate momentum
  // line of the two-step product is summed with the grid's own quadrature.
  RadialState mid;
  mid.grid = b.grid;
  mid.values = u_apply(kernel, b, tp, t0, b.grid);
  mid.nu = b.nu;
  const Complex through = state_overlap(a, mid);

  RadialState stepped = mid;
  for (std::size_t m = 0; m < stepped.values.size(); ++m)
    stepped.values[m] += b.values[m];
  const Complex late = state_pair_element(kernel, a, stepped, t, tp);

  // Closure of the k > coverage part of the intermediate line in the
  // two-step cross term <a|(U(t,t') - 1) . (U(t',t0) - 1)|b>.  Both legs
  // are forward contour integrals; their e^{∓i E_k t'} factors cancel.
  Complex cross_tail{0.0, 0.0};
  if (tp != t0 && tp != t) {
    const SeparableModel& model = kernel.model;
    const Side bra = state_side(model, a, t, true);
    const Side ket = state_side(model, b, t0, false);
    const ContourAmps outer = contour_amps(kernel, {bra}, t, tp);
    const ContourAmps inner = contour_amps(kernel, {ket}, tp, t0);
    const double k_cut = grid_coverage(b.grid);

    auto f = [&](double s) -> Complex {
      const double k = k_cut + s;
      const double p = model.phi(k);
      const double e = model.energy_of(k);
      return (k * k / kTwoPiSq) * p * p *
             leg_at(outer.cg, outer.amp.front(), e) *
             leg_at(inner.cg, inner.amp.front(), e);
    };
    // (i/2pi)^2 = -1/(4 pi^2).
    cross_tail = integrate_semiinf(f, kernel.spec, Measure::plain).value /
                 (-4.0 * kPi * kPi);
  }
  return std::abs(direct - through - late - cross_tail);
}

Complex scaled_r_element(const EvolutionKernel& kernel, const RadialState& psi,
                         double nu, double t) {
  kernel.validate();
  const RadialState s = scaled_copy(psi, nu);
  // U = 1 + i R, so R = -i (U - 1).
  return Complex(0.0, -1.0) * state_pair_element(kernel, s, s, t, 0.0);
}

double scaled_flatness(const EvolutionKernel& kernel, const RadialState& psi,
                       double nu, const std::vector<double>& times) {
  if (times.size() < 2)
    throw DomainError("scaled_flatness: need at least two times");
  std::vector<Complex> elems;
  elems.reserve(times.size());
  for (double t : times)
    elems.push_back(scaled_r_element(kernel, psi, nu, t));
  Complex mean{0.0, 0.0};
  for (const Complex& e : elems) mean += e;
  mean /= static_cast<double>(elems.size());
  if (std::abs(mean) < 1e-300)
    throw DegenerateArgumentsError(
        "scaled_flatness: mean element vanishes; statistic undefined");
  double var = 0.0;
  for (const Complex& e : elems) var += std::norm(e - mean);
  var /= static_cast<double>(elems.size());
  return std::sqrt(var) / std::abs(mean);
}

double hp_leak(const EvolutionKernel& kernel, const RadialState& psi_fixed,
               const RadialState& psi, double nu, double t) {
  kernel.validate();
  psi_fixed.validate();
  bool all_zero = true;
  for (const Complex& v : psi_fixed.values)
    if (v != Complex(0.0, 0.0)) { all_zero = false; break; }
  if (all_zero) return 0.0;
  const RadialState s = scaled_copy(psi, nu);
  return std::abs(state_pair_element(kernel, s, psi_fixed, t, 0.0));
}

double generator_slope(const EvolutionKernel& kernel, double k,
                       const RadialState& psi, double t_lo, double t_hi,
                       int n_times, double max_residual) {
  kernel.validate();
  psi.validate();
  if (!(t_lo > 0.0) || !(t_hi > t_lo))
    throw DomainError("generator_slope: need 0 < t_lo < t_hi");
  if (n_times < 3)
    throw DomainError("generator_slope: need at least three times");

  const double ratio = std::log(t_hi / t_lo);
  std::vector<double> xs(n_times), ys(n_times);
  const Side b = state_side(kernel.model, psi, 0.0, false);
  for (int i = 0; i < n_times; ++i) {
    const double t = t_lo * std::exp(ratio * i / (n_times - 1));
    const Side a = point_side(kernel.model, k, t, true);
    // |R| = |U - 1|: the phase -i of R does not move the magnitude.
    const double mag = std::abs(element_from_sides(kernel, a, b, t, 0.0));
    if (!(mag > 0.0))
      throw AccuracyError("generator_slope: element vanished; no power law",
                          Complex(0.0, 0.0), 0.0);
    xs[i] = std::log(t);
    ys[i] = std::log(mag);
  }

  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n_times; ++i) { mx += xs[i]; my += ys[i]; }
  mx /= n_times;
  my /= n_times;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n_times; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double icept = my - slope * mx;
  double rss = 0.0;
  for (int i = 0; i < n_times; ++i) {
    const double r = ys[i] - slope * xs[i] - icept;
    rss += r * r;
  }
  const double resid = std::sqrt(rss / n_times);
  if (resid > max_residual)
    throw AccuracyError("generator_slope: log-log fit residual too large",
                        Complex(slope, 0.0), resid);
  return slope;
}

}  // namespace sepdyn
