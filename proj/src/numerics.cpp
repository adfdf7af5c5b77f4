#include "sepdyn/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

namespace sepdyn {

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7/15 rule (nodes on [0, 1] side; symmetric)
// ---------------------------------------------------------------------------

// Abscissae of the 15-point Kronrod rule; even entries are the embedded
// 7-point Gauss rule.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEval {
  Complex value{0.0, 0.0};
  double error = 0.0;   // QUADPACK-style scaled estimate
  double resabs = 0.0;  // integral of |f|
};

PanelEval gk15(const std::function<Complex(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);

  Complex fv[15];
  for (int j = 0; j < 7; ++j) {
    fv[j] = f(c - h * kXgk[j]);
    fv[14 - j] = f(c + h * kXgk[j]);
  }
  fv[7] = f(c);

  Complex resk{0.0, 0.0}, resg{0.0, 0.0};
  double resabs = 0.0;
  for (int j = 0; j < 7; ++j) {
    resk += kWgk[j] * (fv[j] + fv[14 - j]);
    resabs += kWgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
  }
  resk += kWgk[7] * fv[7];
  resabs += kWgk[7] * std::abs(fv[7]);
  for (int j = 0; j < 3; ++j) resg += kWg[j] * (fv[2 * j + 1] + fv[13 - 2 * j]);
  resg += kWg[3] * fv[7];

  const Complex reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fv[7] - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv[j] - reskh) + std::abs(fv[14 - j] - reskh));

  PanelEval out;
  out.value = h * resk;
  out.resabs = h * resabs;
  resasc *= h;
  double err = std::abs(h * (resk - resg));
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  out.error = err;
  return out;
}

struct Segment {
  double a, b;
  Complex value;
  double error;
};

struct SegmentWorse {
  bool operator()(const Segment& l, const Segment& r) const {
    return l.error < r.error;
  }
};

// Adaptive bisection, worst interval first.
IntegralResult adapt(const std::function<Complex(double)>& f, double a,
                     double b, const QuadratureSpec& spec) {
  std::priority_queue<Segment, std::vector<Segment>, SegmentWorse> heap;
  PanelEval first = gk15(f, a, b);
  heap.push({a, b, first.value, first.error});
  Complex total = first.value;
  double err = first.error;
  int used = 1;

  while (err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
    if (used >= spec.max_subdiv || heap.top().error == 0.0)
      throw AccuracyError("quadrature did not converge within the subdivision budget",
                          total, err);
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    PanelEval l = gk15(f, worst.a, mid);
    PanelEval r = gk15(f, mid, worst.b);
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push({worst.a, mid, l.value, l.error});
    heap.push({mid, worst.b, r.value, r.error});
    ++used;
  }
  // A divergent integrand can overflow the running sums; NaN would otherwise
  // slip through the tolerance comparison above and masquerade as converged.
  if (!std::isfinite(err) || !std::isfinite(total.real()) ||
      !std::isfinite(total.imag()))
    throw AccuracyError("quadrature panel sums are not finite", total, err);
  return {total, err};
}

}  // namespace

// ===========================================================================
// QuadratureSpec
// ===========================================================================

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw DomainError("quadrature tolerances must be positive");
  if (max_subdiv < 1) throw DomainError("max_subdiv must be at least 1");
  if (!(tail_start > 0.0)) throw DomainError("tail_start must be positive");
  if (panel_width < 0.0) throw DomainError("panel_width must be >= 0");
  if (plain_halfperiods < 1 || taper_halfperiods < 2)
    throw DomainError("wing half-period counts out of range");
}

// ===========================================================================
// elementary kernels
// ===========================================================================

Complex principal_power(Complex w, double s) {
  if (w == Complex(0.0, 0.0)) {
    if (s > 0.0) return {0.0, 0.0};
    if (s == 0.0) return {1.0, 0.0};
    throw DomainError("principal_power: 0 raised to a negative power");
  }
  // std::log keeps the signed zero of Im w, selecting the cut side.
  return std::exp(s * std::log(w));
}

double cos_pi(double a) {
  // sin(pi*(1/2 - a)) hits an exact zero at half-integer a, where cos(pi a)
  // should vanish identically.
  return std::sin(kPi * (0.5 - a));
}

Complex complex_gamma(Complex s) {
  // Lanczos, g = 7, 9 coefficients.
  static const double kCoef[9] = {
      0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,    12.507343278686905,
      -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};

  if (s.imag() == 0.0 && s.real() <= 0.0 &&
      s.real() == std::floor(s.real()))
    throw DomainError("complex_gamma: pole at non-positive integer");

  if (s.real() < 0.5) {
    // Reflection: Gamma(s) = pi / (sin(pi s) * Gamma(1 - s)).
    const Complex sinpis = std::sin(kPi * s);
    if (sinpis == Complex(0.0, 0.0))
      throw DomainError("complex_gamma: pole at non-positive integer");
    return kPi / (sinpis * complex_gamma(1.0 - s));
  }

  const Complex z = s - 1.0;
  Complex acc = kCoef[0];
  for (int i = 1; i < 9; ++i) acc += kCoef[i] / (z + static_cast<double>(i));
  const Complex t = z + 7.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

// ===========================================================================
// Gauss-Legendre
// ===========================================================================

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: order must be positive");
  static std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton from the Chebyshev-like initial guess.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    rule.w[i] = rule.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

// ===========================================================================
// semi-infinite integrals
// ===========================================================================

IntegralResult integrate_finite(const std::function<Complex(double)>& f,
                                double a, double b,
                                const QuadratureSpec& spec) {
  spec.validate();
  if (!(b > a)) throw DomainError("integrate_finite: need b > a");
  return adapt(f, a, b, spec);
}

IntegralResult integrate_semiinf(const std::function<Complex(double)>& f,
                                 const QuadratureSpec& spec, Measure measure) {
  spec.validate();
  const double T = spec.tail_start;

  // Split the budget between the head and the compressed tail.
  QuadratureSpec half = spec;
  half.max_subdiv = std::max(1, spec.max_subdiv / 2);
  half.abs_tol = 0.5 * spec.abs_tol;

  IntegralResult head, tail;
  try {
    head = adapt(f, 0.0, T, half);

    // Screen the tail before chasing it: sample |f| on a geometric ladder
    // and fit the decay exponent.  A slope of -1 or shallower means the tail
    // integral diverges (logarithmically or worse) and refinement would only
    // ride the singularity into overflow.  Zero or non-finite samples skip
    // the fit (compactly supported or already-pathological integrands).
    {
      double lk[4], lf[4];
      bool usable = true;
      for (int i = 0; i < 4; ++i) {
        const double k = T * static_cast<double>(1 << i);
        const double mag = std::abs(f(k));
        if (!(mag > 0.0) || !std::isfinite(mag)) {
          usable = false;
          break;
        }
        lk[i] = std::log(k);
        lf[i] = std::log(mag);
      }
      if (usable) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (int i = 0; i < 4; ++i) {
          sx += lk[i];
          sy += lf[i];
          sxx += lk[i] * lk[i];
          sxy += lk[i] * lf[i];
        }
        const double slope = (4.0 * sxy - sx * sy) / (4.0 * sxx - sx * sx);
        if (slope >= -1.02)
          throw AccuracyError(
              "integrand tail decays too slowly to integrate", head.value,
              std::numeric_limits<double>::infinity());
      }
    }

    tail = adapt([&f](double u) { return f(1.0 / u) / (u * u); }, 0.0, 1.0 / T,
                 half);
  } catch (const AccuracyError& e) {
    throw AccuracyError(std::string("integrate_semiinf: ") + e.what(),
                        e.best_estimate(), e.error_bound());
  }

  IntegralResult out;
  out.value = head.value + tail.value;
  out.error_bound = head.error_bound + tail.error_bound;
  if (measure == Measure::radial3d) {
    const double fac = 1.0 / (2.0 * kPi * kPi);
    out.value *= fac;
    out.error_bound *= fac;
  }
  return out;
}

// ===========================================================================
// oscillatory line integrals
// ===========================================================================

double contour_height(double t, double t0) {
  const double w = t - t0;
  if (w <= 0.0) return 1.0;
  return std::min(1.0, 1.0 / w);
}

namespace {

struct ContourPanel {
  double a, b;
  double weight;  // 1 in the core/plain zone, binomial taper in the wing end
  bool wing;      // true outside the finely panelled core
};

// Cumulative binomial taper weights gamma_1..gamma_K for iterated averaging
// of K alternating half-period partial sums.
std::vector<double> taper_weights(int K) {
  std::vector<double> binom(K + 1);
  binom[0] = 1.0;
  for (int i = 1; i <= K; ++i)
    binom[i] = binom[i - 1] * (K - i + 1) / static_cast<double>(i);
  const double scale = std::ldexp(1.0, -K);  // 2^-K
  std::vector<double> g(K + 1, 0.0);
  double acc = 0.0;
  for (int j = K; j >= 1; --j) {
    acc += binom[j];
    g[j] = acc * scale;
  }
  return g;
}

std::vector<ContourPanel> contour_panels(double t, double t0,
                                         const QuadratureSpec& spec,
                                         double x_core) {
  spec.validate();
  if (t < t0) throw DomainError("contour grid: need t >= t0");

  const double omega = t - t0;
  const double wp = spec.panel_width > 0.0
                        ? spec.panel_width
                        : kPi / std::max({t, t0, 1.0});

  std::vector<ContourPanel> panels;

  // Core region, symmetric about the origin.
  const double want = std::max(spec.tail_start, x_core);
  const int ncore = static_cast<int>(std::ceil(want / wp));
  const double X0 = ncore * wp;
  panels.reserve(4 * ncore);
  for (int i = -ncore; i < ncore; ++i)
    panels.push_back({i * wp, (i + 1) * wp, 1.0, false});

  const double grow = 0.15;  // geometric envelope zone: panel ~ grow * x

  if (omega > 0.0) {
    const double h = kPi / omega;
    const int P0 = spec.plain_halfperiods;
    const int K = spec.taper_halfperiods;
    const std::vector<double> g = taper_weights(K);
    // Envelope zone out to where a half-period no longer sees the power-law
    // envelope vary appreciably; then whole half-periods, tapered at the end.
    const double xt = std::max(X0, 16.0 * h);
    for (int side = 0; side < 2; ++side) {
      double x = X0;
      while (x < xt) {
        double w = std::min({x * grow, 0.5 * h, xt - x});
        if (w < 0.25 * wp) w = std::min(0.25 * wp, xt - x);
        if (w <= 1e-12 * (1.0 + x)) break;
        panels.push_back(side == 0
                             ? ContourPanel{x, x + w, 1.0, true}
                             : ContourPanel{-(x + w), -x, 1.0, true});
        x += w;
      }
      for (int p = 0; p < P0 + K; ++p) {
        const double wgt = p < P0 ? 1.0 : g[p - P0 + 1];
        panels.push_back(side == 0
                             ? ContourPanel{x, x + h, wgt, true}
                             : ContourPanel{-(x + h), -x, wgt, true});
        x += h;
      }
    }
  } else {
    // No oscillation: compress each wing with u = 1/x over geometric levels.
    // Panels are emitted in the u variable; the grid builder maps them back.
    // Encoded with a < b and weight = -1 as a marker handled below.
    const int levels = 48;
    for (int side = 0; side < 2; ++side) {
      double hi = 1.0 / X0;
      for (int j = 0; j < levels; ++j) {
        const double lo = 0.5 * hi;
        panels.push_back({side == 0 ? lo : -hi, side == 0 ? hi : -lo, -1.0,
                          true});
        hi = lo;
      }
    }
  }
  return panels;
}

}  // namespace

ContourGrid make_contour_grid(double t, double t0, const QuadratureSpec& spec,
                              double x_core, double y_override) {
  const std::vector<ContourPanel> panels = contour_panels(t, t0, spec, x_core);
  ContourGrid grid;
  grid.y = y_override > 0.0 ? y_override : contour_height(t, t0);

  const GaussRule& gl = gauss_legendre(8);
  grid.x.reserve(panels.size() * 15);
  grid.w.reserve(panels.size() * 15);
  for (const ContourPanel& p : panels) {
    if (p.weight >= 0.0) {
      const double c = 0.5 * (p.a + p.b), h = 0.5 * (p.b - p.a);
      for (int j = 0; j < 7; ++j) {
        grid.x.push_back(c - h * kXgk[j]);
        grid.w.push_back(p.weight * h * kWgk[j]);
        grid.x.push_back(c + h * kXgk[j]);
        grid.w.push_back(p.weight * h * kWgk[j]);
      }
      grid.x.push_back(c);
      grid.w.push_back(p.weight * h * kWgk[7]);
    } else {
      // u-panel marker: map u-nodes back to x = 1/u with Jacobian 1/u^2.
      const double c = 0.5 * (p.a + p.b), h = 0.5 * (p.b - p.a);
      for (int j = 0; j < 8; ++j) {
        const double u = c + h * gl.x[j];
        grid.x.push_back(1.0 / u);
        grid.w.push_back(h * gl.w[j] / (u * u));
      }
    }
  }
  return grid;
}

IntegralResult contour_line_integral(const std::function<Complex(Complex)>& F,
                                     double t, double t0,
                                     const QuadratureSpec& spec, double x_core,
                                     double y_override) {
  const std::vector<ContourPanel> panels = contour_panels(t, t0, spec, x_core);
  const double y = y_override > 0.0 ? y_override : contour_height(t, t0);
  const double omega = t - t0;

  auto fx = [&](double x) { return F(Complex(x, y)); };

  Complex sum{0.0, 0.0};
  double rule_err = 0.0;
  double edge_mag = 0.0;   // |F| near the outer truncation edge
  double inner_mag = 0.0;  // |F| two panels earlier, for the decay fit
  double edge_x = 0.0, inner_x = 0.0;
  double first_level = -1.0, last_level = 0.0;

  const GaussRule& gl = gauss_legendre(8);
  const size_t n = panels.size();
  for (size_t i = 0; i < n; ++i) {
    const ContourPanel& p = panels[i];
    if (p.weight >= 0.0) {
      PanelEval e = gk15(fx, p.a, p.b);
      sum += p.weight * e.value;
      rule_err += p.weight * e.error;
      if (p.wing) {
        const double width = p.b - p.a;
        const double mag = e.resabs / width;
        const double xc = 0.5 * std::abs(p.a + p.b);
        if (xc > edge_x) {
          inner_mag = edge_mag;
          inner_x = edge_x;
          edge_mag = mag;
          edge_x = xc;
        }
      }
    } else {
      // u-compressed tail level.
      Complex lv{0.0, 0.0};
      const double c = 0.5 * (p.a + p.b), h = 0.5 * (p.b - p.a);
      for (int j = 0; j < 8; ++j) {
        const double u = c + h * gl.x[j];
        lv += h * gl.w[j] / (u * u) * fx(1.0 / u);
      }
      sum += lv;
      const double m = std::abs(lv);
      if (first_level < 0.0) first_level = m;
      last_level = m;
    }
  }

  if (omega <= 0.0 && first_level > 0.0 && last_level > 0.25 * first_level)
    throw AccuracyError(
        "contour_line_integral: integrand decays too slowly for the "
        "non-oscillatory tail compression",
        Complex(0.0, 1.0) / (2.0 * kPi) * sum, std::abs(sum));

  // Truncation estimate from the fitted power envelope at the edge.
  double trunc = 0.0;
  if (edge_mag > 0.0) {
    double q = 1.5;
    if (inner_mag > 0.0 && edge_x > 1.05 * inner_x && edge_mag < inner_mag)
      q = std::log(inner_mag / edge_mag) / std::log(edge_x / inner_x);
    q = std::clamp(q, 1.05, 6.0);
    const double plain = edge_mag * edge_x / (q - 1.0);
    trunc = omega > 0.0 ? std::min(plain, 2.0 * edge_mag / omega) : plain;
  }

  const Complex pref(0.0, 1.0 / (2.0 * kPi));
  IntegralResult out;
  out.value = pref * sum;
  out.error_bound = (rule_err + trunc) / (2.0 * kPi);
  return out;
}

}  // namespace sepdyn
