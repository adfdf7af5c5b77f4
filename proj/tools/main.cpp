// ===========================================================================
// sepdyn command-line driver
//
// Subcommands:
//   check             built-in consistency checks, one pass/fail row each
//   tmatrix           scattering amplitude t(z) on a list of energies
//   phase-shift       phase shift and effective-range function on a p grid
//   cutoff-sweep      regulated contact amplitude across cutoffs
//   tail-fit          fitted large-|z| tail coefficients vs closed forms
//   evolve            interaction-picture evolution of a wave packet
//   scale-diagnostic  diagonal response and flatness across state scales
//
// Every value can come from (highest precedence first) a command-line flag,
// the file named by --config (flat "key = value" lines, dotted sections),
// or a built-in default.  Tables render as CSV or JSON with full-precision
// numbers; repeated runs with the same inputs produce byte-identical output.
//
// Exit codes: 0 success; 1 a check ran and exceeded its tolerance;
// 2 bad arguments or configuration.
// ===========================================================================

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <future>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "sepdyn/asymptotics.hpp"
#include "sepdyn/config.hpp"
#include "sepdyn/errors.hpp"
#include "sepdyn/evolution.hpp"
#include "sepdyn/formfactor.hpp"
#include "sepdyn/loops.hpp"
#include "sepdyn/model.hpp"
#include "sepdyn/numerics.hpp"
#include "sepdyn/renorm.hpp"
#include "sepdyn/table.hpp"
#include "sepdyn/tmatrix.hpp"

namespace {

using sepdyn::Cell;
using sepdyn::Complex;
using sepdyn::Config;
using sepdyn::ConfigError;
using sepdyn::Coupling;
using sepdyn::CouplingKind;
using sepdyn::CutoffKind;
using sepdyn::EvolutionKernel;
using sepdyn::FormFactor;
using sepdyn::FormFactorKind;
using sepdyn::GridRequest;
using sepdyn::QuadratureSpec;
using sepdyn::RadialState;
using sepdyn::SeparableModel;
using sepdyn::Table;

constexpr double kPi = std::numbers::pi;

// ===========================================================================
// deterministic parallel map
// ===========================================================================

// Runs fn(0) ... fn(n - 1) across a small thread pool.  Results must be
// written into per-index slots by the callers, so the output order never
// depends on scheduling; with one hardware thread this degrades to a plain
// loop.  The first exception thrown by any index is rethrown here.
template <typename Fn>
void parallel_for_index(std::size_t n, Fn&& fn) {
  if (n == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t workers = std::min<std::size_t>({hw == 0 ? 1 : hw, 8, n});
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> tasks;
  tasks.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    tasks.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        fn(i);
      }
    }));
  }
  for (auto& task : tasks) task.get();
}

// ===========================================================================
// flag / config resolution helpers
// ===========================================================================

// Flags beat config keys beat fallbacks.  Each helper takes the CLI option
// (to see whether the flag was actually passed), the flag's storage, and the
// config key to consult otherwise.

double number_or(const CLI::Option* opt, double flag_value, const Config& cfg,
                 const std::string& key, double fallback) {
  if (opt != nullptr && opt->count() > 0) return flag_value;
  return cfg.get_number(key, fallback);
}

std::string text_or(const CLI::Option* opt, const std::string& flag_value,
                    const Config& cfg, const std::string& key,
                    const std::string& fallback) {
  if (opt != nullptr && opt->count() > 0) return flag_value;
  return cfg.get_text(key, fallback);
}

std::vector<double> list_or(const CLI::Option* opt,
                            const std::vector<double>& flag_value,
                            const Config& cfg, const std::string& key,
                            const std::vector<double>& fallback) {
  if (opt != nullptr && opt->count() > 0) return flag_value;
  return cfg.get_numbers(key, fallback);
}

int to_int(double v, const std::string& what) {
  double r = std::round(v);
  if (!std::isfinite(v) || std::abs(v - r) > 1e-9 || std::abs(r) > 1e9) {
    throw ConfigError(what + " must be an integer");
  }
  return static_cast<int>(r);
}

// ===========================================================================
// common output options
// ===========================================================================

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::string format_name;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_format = nullptr;
};

void attach_common_options(CLI::App& cmd, CommonOptions& c) {
  cmd.add_option("--config", c.config_path,
                 "configuration file with 'key = value' lines");
  c.o_out = cmd.add_option("--out", c.out_path,
                           "write the result table to this file "
                           "(default: stdout)");
  c.o_format = cmd.add_option("--format", c.format_name,
                              "output format: csv or json (default: csv)");
}

Config load_config(const CommonOptions& c) {
  if (c.config_path.empty()) return Config();
  return Config::parse_file(c.config_path);
}

void emit_table(const CommonOptions& c, const Config& cfg,
                const Table& table) {
  const std::string format =
      text_or(c.o_format, c.format_name, cfg, "output.format", "csv");
  const std::string out =
      text_or(c.o_out, c.out_path, cfg, "output.path", "");
  sepdyn::write_table(table, sepdyn::table_format_from(format), out);
}

const std::vector<std::string> kOutputKeys = {"output.path", "output.format"};
const std::vector<std::string> kModelKeys = {
    "model.mass",     "model.form_factor",  "model.alpha",
    "model.beta",     "model.coupling",     "model.coupling_value"};

// model + output keys plus the task keys a subcommand understands
std::vector<std::string> allowed_keys(const std::vector<std::string>& task,
                                      bool with_model = true) {
  std::vector<std::string> keys = kOutputKeys;
  if (with_model) keys.insert(keys.end(), kModelKeys.begin(), kModelKeys.end());
  keys.insert(keys.end(), task.begin(), task.end());
  return keys;
}

// ===========================================================================
// model options
// ===========================================================================

struct ModelOptions {
  double mass = 1.0;
  std::string form;
  double alpha = 0.0;
  double beta = 1.0;
  std::string coupling;
  double coupling_value = 0.0;
  double cr = 0.0;
  double g0 = 0.0;
  double lambda = 0.0;
  double b2 = 0.0;

  CLI::Option* o_mass = nullptr;
  CLI::Option* o_form = nullptr;
  CLI::Option* o_alpha = nullptr;
  CLI::Option* o_beta = nullptr;
  CLI::Option* o_coupling = nullptr;
  CLI::Option* o_value = nullptr;
  CLI::Option* o_cr = nullptr;
  CLI::Option* o_g0 = nullptr;
  CLI::Option* o_lambda = nullptr;
  CLI::Option* o_b2 = nullptr;
};

void attach_model_options(CLI::App& cmd, ModelOptions& m) {
  m.o_mass = cmd.add_option("--mass", m.mass,
                            "dispersion mass m, E = k^2/m (default: 1)");
  m.o_form = cmd.add_option(
      "--form", m.form,
      "form factor: unit, pure-power, regulated-power, or yamaguchi "
      "(default: inferred from --alpha/--beta, else unit)");
  m.o_alpha = cmd.add_option("--alpha", m.alpha,
                             "form-factor tail exponent (default: 0)");
  m.o_beta = cmd.add_option("--beta", m.beta,
                            "form-factor range parameter (default: 1)");
  m.o_coupling = cmd.add_option("--coupling", m.coupling,
                                "coupling parametrization: cr, g0, lambda, "
                                "or b2");
  m.o_value = cmd.add_option("--coupling-value", m.coupling_value,
                             "numeric value for --coupling");
  m.o_cr = cmd.add_option("--cr", m.cr,
                          "renormalized contact coupling (default coupling: "
                          "cr = 8 pi)");
  m.o_g0 = cmd.add_option("--g0", m.g0, "zero-energy coupling g0");
  m.o_lambda = cmd.add_option("--lambda", m.lambda,
                              "bare rank-one strength lambda");
  m.o_b2 = cmd.add_option("--b2", m.b2, "second large-|z| tail coefficient");
}

Coupling coupling_from_name(const std::string& name, double value) {
  if (name == "cr") return Coupling::cr(value);
  if (name == "g0") return Coupling::g0(value);
  if (name == "lambda") return Coupling::lambda(value);
  if (name == "b2") return Coupling::tail_b2(value);
  throw ConfigError("unknown coupling '" + name +
                    "' (expected cr, g0, lambda, or b2)");
}

FormFactor form_from_name(const std::string& name, double alpha, double beta) {
  if (name == "unit") return FormFactor::unit();
  if (name == "pure-power" || name == "pure_power") {
    return FormFactor::pure_power(alpha);
  }
  if (name == "regulated-power" || name == "regulated_power") {
    return FormFactor::regulated_power(alpha, beta);
  }
  if (name == "yamaguchi") return FormFactor::yamaguchi(beta);
  throw ConfigError("unknown form factor '" + name +
                    "' (expected unit, pure-power, regulated-power, or "
                    "yamaguchi)");
}

SeparableModel resolve_model(const ModelOptions& m, const Config& cfg) {
  const double mass = number_or(m.o_mass, m.mass, cfg, "model.mass", 1.0);
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw ConfigError("model.mass must be positive and finite");
  }
  const double mu = 0.5 * mass;

  // --- coupling: shorthand flag > --coupling pair > config pair > default
  const int shorthands = (m.o_cr->count() > 0 ? 1 : 0) +
                         (m.o_g0->count() > 0 ? 1 : 0) +
                         (m.o_lambda->count() > 0 ? 1 : 0) +
                         (m.o_b2->count() > 0 ? 1 : 0);
  if (shorthands > 1) {
    throw ConfigError("at most one of --cr, --g0, --lambda, --b2 may be "
                      "given");
  }
  Coupling coupling = Coupling::cr(8.0 * kPi);
  if (m.o_cr->count() > 0) {
    coupling = Coupling::cr(m.cr);
  } else if (m.o_g0->count() > 0) {
    coupling = Coupling::g0(m.g0);
  } else if (m.o_lambda->count() > 0) {
    coupling = Coupling::lambda(m.lambda);
  } else if (m.o_b2->count() > 0) {
    coupling = Coupling::tail_b2(m.b2);
  } else {
    const std::string kind =
        text_or(m.o_coupling, m.coupling, cfg, "model.coupling", "");
    const bool have_value =
        m.o_value->count() > 0 || cfg.has("model.coupling_value");
    if (!kind.empty()) {
      if (!have_value) {
        throw ConfigError("coupling '" + kind +
                          "' needs --coupling-value or model.coupling_value");
      }
      coupling = coupling_from_name(
          kind,
          number_or(m.o_value, m.coupling_value, cfg, "model.coupling_value",
                    0.0));
    } else if (have_value) {
      throw ConfigError(
          "a coupling value was given without naming the coupling "
          "(--coupling or model.coupling)");
    }
  }

  // --- form factor: explicit name > inference from alpha/beta > unit
  const bool alpha_given = m.o_alpha->count() > 0 || cfg.has("model.alpha");
  const bool beta_given = m.o_beta->count() > 0 || cfg.has("model.beta");
  const double alpha = number_or(m.o_alpha, m.alpha, cfg, "model.alpha", 0.0);
  const double beta = number_or(m.o_beta, m.beta, cfg, "model.beta", 1.0);
  const std::string form =
      text_or(m.o_form, m.form, cfg, "model.form_factor", "");
  FormFactor phi = FormFactor::unit();
  if (!form.empty()) {
    phi = form_from_name(form, alpha, beta);
  } else if (alpha_given && beta_given) {
    phi = FormFactor::regulated_power(alpha, beta);
  } else if (alpha_given) {
    phi = alpha == 0.0 ? FormFactor::unit() : FormFactor::pure_power(alpha);
  } else if (beta_given) {
    phi = FormFactor::yamaguchi(beta);
  }

  SeparableModel model{mu, phi, coupling};
  model.validate();
  return model;
}

// ===========================================================================
// tmatrix
// ===========================================================================

struct TmatrixOptions {
  CommonOptions common;
  ModelOptions model;
  std::vector<double> z_re;
  double z_im = 0.0;
  CLI::Option* o_z = nullptr;
  CLI::Option* o_zim = nullptr;
};

int run_tmatrix(const TmatrixOptions& o) {
  const Config cfg = load_config(o.common);
  cfg.require_known(allowed_keys({"task.z_list", "task.z_im"}));
  const SeparableModel model = resolve_model(o.model, cfg);

  const std::vector<double> z_re =
      list_or(o.o_z, o.z_re, cfg, "task.z_list", {-1.0});
  const double z_im = number_or(o.o_zim, o.z_im, cfg, "task.z_im", 0.0);

  std::vector<Complex> values(z_re.size());
  parallel_for_index(z_re.size(), [&](std::size_t i) {
    values[i] = sepdyn::t_of(model, Complex(z_re[i], z_im));
  });

  Table table({"re_z", "im_z", "re_t", "im_t"});
  for (std::size_t i = 0; i < z_re.size(); ++i) {
    table.add_row({Cell::number(z_re[i]), Cell::number(z_im),
                   Cell::number(values[i].real()),
                   Cell::number(values[i].imag())});
  }
  emit_table(o.common, cfg, table);
  return 0;
}

// ===========================================================================
// phase-shift
// ===========================================================================

struct PhaseShiftOptions {
  CommonOptions common;
  ModelOptions model;
  std::vector<double> p_list;
  double p_lo = 1e-2;
  double p_hi = 10.0;
  int p_n = 25;
  CLI::Option* o_p = nullptr;
  CLI::Option* o_lo = nullptr;
  CLI::Option* o_hi = nullptr;
  CLI::Option* o_n = nullptr;
};

int run_phase_shift(const PhaseShiftOptions& o) {
  const Config cfg = load_config(o.common);
  cfg.require_known(allowed_keys(
      {"task.p_list", "task.p_lo", "task.p_hi", "task.p_count"}));
  const SeparableModel model = resolve_model(o.model, cfg);

  std::vector<double> ps;
  if (o.o_p->count() > 0 || cfg.has("task.p_list")) {
    ps = list_or(o.o_p, o.p_list, cfg, "task.p_list", {});
  } else {
    const double lo = number_or(o.o_lo, o.p_lo, cfg, "task.p_lo", 1e-2);
    const double hi = number_or(o.o_hi, o.p_hi, cfg, "task.p_hi", 10.0);
    const int n = o.o_n->count() > 0
                      ? o.p_n
                      : to_int(cfg.get_number("task.p_count", 25.0),
                               "task.p_count");
    ps = sepdyn::log_spaced(lo, hi, n);
  }

  std::vector<double> delta(ps.size());
  std::vector<double> pcot(ps.size());
  parallel_for_index(ps.size(), [&](std::size_t i) {
    delta[i] = sepdyn::phase_shift(model, ps[i]);
    pcot[i] = sepdyn::ere_function(model, ps[i]).real();
  });

  Table table({"p", "delta", "p_cot_delta"});
  for (std::size_t i = 0; i < ps.size(); ++i) {
    table.add_row({Cell::number(ps[i]), Cell::number(delta[i]),
                   Cell::number(pcot[i])});
  }
  emit_table(o.common, cfg, table);
  return 0;
}

// ===========================================================================
// cutoff-sweep
// ===========================================================================

struct CutoffSweepOptions {
  CommonOptions common;
  ModelOptions model;
  std::string scheme = "sharp";
  std::vector<double> cutoffs;
  double z_re = -1.0;
  double z_im = 0.0;
  CLI::Option* o_scheme = nullptr;
  CLI::Option* o_cutoffs = nullptr;
  CLI::Option* o_z = nullptr;
  CLI::Option* o_zim = nullptr;
};

CutoffKind cutoff_kind_from(const std::string& name) {
  if (name == "sharp") return CutoffKind::sharp;
  if (name == "gaussian") return CutoffKind::gaussian;
  if (name == "dipole") return CutoffKind::dipole;
  throw ConfigError("unknown cutoff scheme '" + name +
                    "' (expected sharp, gaussian, or dipole)");
}

int run_cutoff_sweep(const CutoffSweepOptions& o) {
  const Config cfg = load_config(o.common);
  cfg.require_known(allowed_keys(
      {"task.scheme", "task.cutoffs", "task.z_list", "task.z_im"}));
  const SeparableModel model = resolve_model(o.model, cfg);
  if (model.phi.kind() != FormFactorKind::unit ||
      model.coupling.kind != CouplingKind::cr) {
    throw ConfigError("cutoff-sweep compares against the contact limit; use "
                      "a unit form factor with a cr coupling (--cr)");
  }

  const CutoffKind kind = cutoff_kind_from(
      text_or(o.o_scheme, o.scheme, cfg, "task.scheme", "sharp"));
  const std::vector<double> cutoffs =
      list_or(o.o_cutoffs, o.cutoffs, cfg, "task.cutoffs",
              sepdyn::log_spaced(1e1, 1e5, 9));
  std::vector<double> z_list = {-1.0};
  if (o.o_z->count() > 0) {
    z_list = {o.z_re};
  } else if (cfg.has("task.z_list")) {
    z_list = cfg.get_numbers("task.z_list", {});
  }
  if (z_list.size() != 1) {
    throw ConfigError("cutoff-sweep evaluates at a single energy; task."
                      "z_list must hold exactly one entry");
  }
  const Complex z(z_list[0],
                  number_or(o.o_zim, o.z_im, cfg, "task.z_im", 0.0));

  const std::vector<sepdyn::SweepRow> rows = sepdyn::cutoff_sweep(
      model.coupling.value, model.mass(), z, cutoffs, kind);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  Table table({"lambda", "re_T", "im_T", "abs_err", "rel_err"});
  for (const auto& row : rows) {
    if (row.pole) {
      table.add_row({Cell::number(row.lambda), Cell::number(nan),
                     Cell::number(nan), Cell::number(nan),
                     Cell::number(nan)});
    } else {
      table.add_row({Cell::number(row.lambda), Cell::number(row.t.real()),
                     Cell::number(row.t.imag()), Cell::number(row.abs_err),
                     Cell::number(row.rel_err)});
    }
  }
  emit_table(o.common, cfg, table);
  return 0;
}

// ===========================================================================
// tail-fit
// ===========================================================================

struct TailFitOptions {
  CommonOptions common;
  std::vector<double> alphas;
  double b2 = 1.0;
  double mass = 1.0;
  CLI::Option* o_alphas = nullptr;
  CLI::Option* o_b2 = nullptr;
  CLI::Option* o_mass = nullptr;
};

int run_tail_fit(const TailFitOptions& o) {
  const Config cfg = load_config(o.common);
  cfg.require_known(allowed_keys({"task.alpha_list", "task.b2", "model.mass"},
                                 /*with_model=*/false));
  const double mass = number_or(o.o_mass, o.mass, cfg, "model.mass", 1.0);
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw ConfigError("model.mass must be positive and finite");
  }
  const double mu = 0.5 * mass;
  const std::vector<double> alphas =
      list_or(o.o_alphas, o.alphas, cfg, "task.alpha_list", {0.0, 0.25});
  const double b2 = number_or(o.o_b2, o.b2, cfg, "task.b2", 1.0);

  std::vector<sepdyn::TailFit> fits(alphas.size());
  parallel_for_index(alphas.size(), [&](std::size_t i) {
    const FormFactor phi = alphas[i] == 0.0
                               ? FormFactor::unit()
                               : FormFactor::pure_power(alphas[i]);
    SeparableModel model{mu, phi, Coupling::tail_b2(b2)};
    model.validate();
    fits[i] = sepdyn::tail_fit(model);
  });

  Table table({"alpha", "b1_true", "b1_est", "b2_true", "b2_est", "resid"});
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    table.add_row({Cell::number(alphas[i]),
                   Cell::number(sepdyn::b1_of_alpha(alphas[i], mu)),
                   Cell::number(fits[i].b1), Cell::number(b2),
                   Cell::number(fits[i].b2), Cell::number(fits[i].residual)});
  }
  emit_table(o.common, cfg, table);
  return 0;
}

// ===========================================================================
// evolve
// ===========================================================================

struct EvolveOptions {
  CommonOptions common;
  ModelOptions model;
  std::vector<double> t_list;
  double t0 = 0.0;
  std::string profile = "gaussian";
  double k_max = 9.0;
  double density = 0.3;
  int order = 3;
  double contour_height = 1.0;
  double tail_start = 40.0;
  CLI::Option* o_t = nullptr;
  CLI::Option* o_t0 = nullptr;
  CLI::Option* o_profile = nullptr;
  CLI::Option* o_kmax = nullptr;
  CLI::Option* o_density = nullptr;
  CLI::Option* o_order = nullptr;
  CLI::Option* o_height = nullptr;
  CLI::Option* o_tail = nullptr;
};

std::function<Complex(double)> profile_from_name(const std::string& name) {
  if (name == "gaussian") return sepdyn::gaussian_profile();
  if (name == "bump") return sepdyn::bump_profile();
  throw ConfigError("unknown profile '" + name +
                    "' (expected gaussian or bump)");
}

int run_evolve(const EvolveOptions& o) {
  const Config cfg = load_config(o.common);
  cfg.require_known(allowed_keys(
      {"task.t_list", "task.t0", "task.profile", "task.k_max", "task.density",
       "task.gauss_order", "task.contour_height", "task.tail_start"}));
  const SeparableModel model = resolve_model(o.model, cfg);

  const std::vector<double> ts =
      list_or(o.o_t, o.t_list, cfg, "task.t_list", {0.5, 1.0});
  const double t0 = number_or(o.o_t0, o.t0, cfg, "task.t0", 0.0);
  const std::string profile_name =
      text_or(o.o_profile, o.profile, cfg, "task.profile", "gaussian");
  const double k_max = number_or(o.o_kmax, o.k_max, cfg, "task.k_max", 9.0);
  const double density =
      number_or(o.o_density, o.density, cfg, "task.density", 0.3);
  const int order = o.o_order->count() > 0
                        ? o.order
                        : to_int(cfg.get_number("task.gauss_order", 3.0),
                                 "task.gauss_order");
  const double height = number_or(o.o_height, o.contour_height, cfg,
                                  "task.contour_height", 1.0);
  const double tail_start =
      number_or(o.o_tail, o.tail_start, cfg, "task.tail_start", 40.0);

  double osc = std::abs(t0);
  for (double t : ts) osc = std::max(osc, std::abs(t));

  const GridRequest request{.k_max = k_max,
                            .state_scale = 1.0,
                            .osc_time = osc,
                            .pole_height = height,
                            .density = density,
                            .gauss_order = order};
  const sepdyn::RadialGrid grid = sepdyn::make_graded_grid(request);
  const RadialState psi =
      sepdyn::sample_state(grid, profile_from_name(profile_name));

  QuadratureSpec spec;
  spec.tail_start = tail_start;
  const EvolutionKernel kernel{model, height, spec};

  std::vector<std::vector<Complex>> evolved(ts.size());
  parallel_for_index(ts.size(), [&](std::size_t i) {
    std::vector<Complex> delta = sepdyn::u_apply(kernel, psi, ts[i], t0, grid);
    evolved[i].resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      evolved[i][j] = psi.values[j] + delta[j];
    }
  });

  Table table({"t", "k", "re_psi", "im_psi"});
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      table.add_row({Cell::number(ts[i]), Cell::number(grid.k[j]),
                     Cell::number(evolved[i][j].real()),
                     Cell::number(evolved[i][j].imag())});
    }
  }
  emit_table(o.common, cfg, table);
  return 0;
}

// ===========================================================================
// scale-diagnostic
// ===========================================================================

struct ScaleDiagnosticOptions {
  CommonOptions common;
  ModelOptions model;
  std::vector<double> nu_list;
  std::vector<double> t_list;
  double k_max = 5.7;
  double density = 1.0;
  int order = 7;
  double contour_height = 1.0;
  CLI::Option* o_nu = nullptr;
  CLI::Option* o_t = nullptr;
  CLI::Option* o_kmax = nullptr;
  CLI::Option* o_density = nullptr;
  CLI::Option* o_order = nullptr;
  CLI::Option* o_height = nullptr;
};

int run_scale_diagnostic(const ScaleDiagnosticOptions& o) {
  const Config cfg = load_config(o.common);
  cfg.require_known(allowed_keys(
      {"task.nu_list", "task.t_list", "task.k_max", "task.density",
       "task.gauss_order", "task.contour_height"}));
  const SeparableModel model = resolve_model(o.model, cfg);

  const std::vector<double> nus =
      list_or(o.o_nu, o.nu_list, cfg, "task.nu_list", {1.0, 2.0, 4.0});
  const std::vector<double> ts =
      list_or(o.o_t, o.t_list, cfg, "task.t_list", {0.5, 1.0, 2.0, 4.0});
  const double k_max =
      number_or(o.o_kmax, o.k_max, cfg, "task.k_max", 5.7);
  const double density =
      number_or(o.o_density, o.density, cfg, "task.density", 1.0);
  const int order = o.o_order->count() > 0
                        ? o.order
                        : to_int(cfg.get_number("task.gauss_order", 7.0),
                                 "task.gauss_order");
  const double height = number_or(o.o_height, o.contour_height, cfg,
                                  "task.contour_height", 1.0);

  double t_max = 0.0;
  for (double t : ts) t_max = std::max(t_max, std::abs(t));
  if (t_max == 0.0) {
    throw ConfigError("task.t_list needs at least one nonzero time");
  }

  const EvolutionKernel kernel{model, height, QuadratureSpec{}};

  // Per scale nu the base grid must resolve the contour ridge and the phase
  // the scaled nodes will see: base oscillation time nu^2 t and base ridge
  // height y / nu^2 (scaled_copy stretches both back by nu^2).
  std::vector<std::vector<Complex>> elems(nus.size());
  std::vector<double> flatness(nus.size());
  parallel_for_index(nus.size(), [&](std::size_t i) {
    const double nu = nus[i];
    const GridRequest request{.k_max = k_max,
                              .state_scale = 1.0,
                              .osc_time = nu * nu * t_max,
                              .pole_height = height / (nu * nu),
                              .density = density,
                              .gauss_order = order};
    const RadialState psi = sepdyn::sample_state(
        sepdyn::make_graded_grid(request), sepdyn::gaussian_profile());
    flatness[i] = sepdyn::scaled_flatness(kernel, psi, nu, ts);
    elems[i].resize(ts.size());
    for (std::size_t j = 0; j < ts.size(); ++j) {
      elems[i][j] = sepdyn::scaled_r_element(kernel, psi, nu, ts[j]);
    }
  });

  Table table({"nu", "t", "re_elem", "im_elem", "flatness"});
  for (std::size_t i = 0; i < nus.size(); ++i) {
    for (std::size_t j = 0; j < ts.size(); ++j) {
      table.add_row({Cell::number(nus[i]), Cell::number(ts[j]),
                     Cell::number(elems[i][j].real()),
                     Cell::number(elems[i][j].imag()),
                     Cell::number(flatness[i])});
    }
  }
  emit_table(o.common, cfg, table);
  return 0;
}

// ===========================================================================
// check
// ===========================================================================

struct CheckOptions {
  CommonOptions common;
  ModelOptions model;
  double tolerance = 0.0;
  CLI::Option* o_tol = nullptr;
};

struct CheckRow {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
};

int run_check(const CheckOptions& o) {
  const Config cfg = load_config(o.common);
  cfg.require_known(allowed_keys({"task.tolerance"}));
  const SeparableModel model = resolve_model(o.model, cfg);

  std::vector<CheckRow> rows;

  // --- resolvent identity: residual against its rounding budget -----------
  {
    const std::pair<Complex, Complex> pairs[] = {
        {Complex(-1.0, 0.7), Complex(-2.3, 1.1)},
        {Complex(0.4, 2.0), Complex(-5.0, 0.5)},
        {Complex(1.3, 0.9), Complex(-0.2, 3.0)},
    };
    double worst = 0.0;
    for (const auto& [z1, z2] : pairs) {
      double budget = 0.0;
      const double r = sepdyn::hilbert_residual(model, z1, z2, &budget);
      worst = std::max(worst, r / (10.0 * budget));
    }
    rows.push_back({"hilbert_identity", worst, 1.0});
  }

  // --- flow equation residual and its step refinement ----------------------
  rows.push_back(
      {"ode_flow", sepdyn::ode_residual(model, Complex(-1.0, 0.0), 1e-4),
       1e-5});
  {
    const sepdyn::OdeCheck check =
        sepdyn::ode_residual_checked(model, Complex(-1.0, 0.0), 1e-4);
    rows.push_back({"ode_refinement", check.asymptotic ? 0.0 : 1.0, 0.5});
  }

  // --- contact-model rows (unit form factor only) ---------------------------
  std::optional<double> eff_cr;
  if (model.phi.kind() == FormFactorKind::unit) {
    switch (model.coupling.kind) {
      case CouplingKind::cr:
      case CouplingKind::g0:
        // for a unit form factor the zero-energy coupling equals the
        // renormalized contact coupling
        eff_cr = model.coupling.value;
        break;
      case CouplingKind::tail_pair:
        eff_cr = sepdyn::g0_from_b(model);
        break;
      case CouplingKind::lambda:
        break;
    }
  }

  if (eff_cr) {
    const double c = *eff_cr;
    const double m = model.mass();
    const double mu = model.mu;

    // three parametrizations of one amplitude, against the closed form
    {
      const double b1 = sepdyn::b1_of_alpha(0.0, mu);
      SeparableModel via_cr{mu, FormFactor::unit(), Coupling::cr(c)};
      SeparableModel via_g0{mu, FormFactor::unit(), Coupling::g0(c)};
      SeparableModel via_b2{mu, FormFactor::unit(),
                            Coupling::tail_b2(-b1 * b1 / c)};
      const Complex zs[] = {Complex(-0.01, 0.0), Complex(-0.1, 0.0),
                            Complex(-1.0, 0.0),  Complex(-10.0, 0.0),
                            Complex(-100.0, 0.0), Complex(-1000.0, 0.0),
                            Complex(-1.0, 1.0),  Complex(0.5, 2.0),
                            Complex(3.0, 0.7),   Complex(-4.0, 0.3),
                            Complex(0.0, 5.0),   Complex(2.0, 1.5)};
      double worst = 0.0;
      for (const Complex& z : zs) {
        const Complex ref = sepdyn::t_eft_lo(c, m, z);
        const Complex ts[] = {sepdyn::t_of(via_cr, z),
                              sepdyn::t_of(via_g0, z),
                              sepdyn::t_of(via_b2, z)};
        for (const Complex& t : ts) {
          worst = std::max(worst, std::abs(t - ref) / std::abs(ref));
        }
      }
      rows.push_back({"amplitude_forms", worst, 1e-10});
    }

    // on-shell unitarity and constancy of the effective-range function
    {
      const std::vector<double> ps = sepdyn::log_spaced(1e-2, 10.0, 25);
      const double a = sepdyn::scattering_length(c, m);
      double worst_im = 0.0;
      double worst_re = 0.0;
      for (double p : ps) {
        const Complex ere = sepdyn::ere_function(model, p);
        worst_im = std::max(worst_im, std::abs(ere.imag()));
        worst_re =
            std::max(worst_re, std::abs(ere.real() + 1.0 / a) * std::abs(a));
      }
      rows.push_back({"unitarity_imag", worst_im, 1e-8});
      rows.push_back({"pcot_constancy", worst_re, 1e-8});
    }

    // binding energy of the amplitude pole against the closed form
    if (const std::optional<double> closed = sepdyn::bound_state_energy(c, m)) {
      const std::optional<double> pole = sepdyn::find_pole(model);
      const double value =
          pole ? std::abs(*pole - *closed) / std::abs(*closed)
               : std::numeric_limits<double>::infinity();
      rows.push_back({"bound_state", value, 1e-8});
    }
  }

  // --- evolution consistency on the reference grids -------------------------
  {
    const EvolutionKernel kernel{model, 1.0, QuadratureSpec{}};
    const GridRequest req1{.k_max = 9.0,
                           .state_scale = 1.0,
                           .osc_time = 1.0,
                           .pole_height = 1.0,
                           .density = 0.3,
                           .gauss_order = 3};
    const sepdyn::RadialGrid grid1 = sepdyn::make_graded_grid(req1);
    const std::vector<RadialState> basis = {
        sepdyn::sample_state(grid1, sepdyn::gaussian_profile()),
        sepdyn::sample_state(grid1, sepdyn::bump_profile())};
    rows.push_back({"evolution_unitarity",
                    sepdyn::unitarity_residual(kernel, basis, 1.0), 1e-3});

    GridRequest req2 = req1;
    req2.osc_time = 2.0;
    const sepdyn::RadialGrid grid2 = sepdyn::make_graded_grid(req2);
    const RadialState a =
        sepdyn::sample_state(grid2, sepdyn::gaussian_profile());
    const RadialState b = sepdyn::sample_state(grid2, sepdyn::bump_profile());
    rows.push_back({"evolution_composition",
                    sepdyn::composition_residual(kernel, a, b, 2.0, 1.0, 0.0),
                    1e-3});
  }

  // --- render and score ------------------------------------------------------
  const bool tol_override = o.o_tol->count() > 0 || cfg.has("task.tolerance");
  const double tol_value =
      number_or(o.o_tol, o.tolerance, cfg, "task.tolerance", 0.0);

  Table table({"check", "value", "tolerance", "status"});
  bool any_failed = false;
  for (const CheckRow& row : rows) {
    const double tol = tol_override ? tol_value : row.tolerance;
    const bool pass = std::isfinite(row.value) && row.value <= tol;
    any_failed = any_failed || !pass;
    table.add_row({Cell::text(row.name), Cell::number(row.value),
                   Cell::number(tol), Cell::text(pass ? "pass" : "fail")});
  }
  emit_table(o.common, cfg, table);
  return any_failed ? 1 : 0;
}

}  // namespace

// ===========================================================================
// entry point
// ===========================================================================

int main(int argc, char** argv) {
  CLI::App app{
      "rank-one separable interactions: amplitudes, renormalization "
      "sweeps, tail fits, and interaction-picture evolution"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  int rc = 0;

  // --- check ---------------------------------------------------------------
  auto check = std::make_shared<CheckOptions>();
  {
    CLI::App* cmd = app.add_subcommand(
        "check", "run built-in consistency checks, one pass/fail row each");
    attach_common_options(*cmd, check->common);
    attach_model_options(*cmd, check->model);
    check->o_tol = cmd->add_option(
        "--tolerance", check->tolerance,
        "override the per-check tolerances with one value");
    cmd->callback([check, &rc] { rc = run_check(*check); });
  }

  // --- tmatrix ---------------------------------------------------------------
  auto tmat = std::make_shared<TmatrixOptions>();
  {
    CLI::App* cmd = app.add_subcommand(
        "tmatrix", "evaluate the scattering amplitude t(z) at complex "
                   "energies");
    attach_common_options(*cmd, tmat->common);
    attach_model_options(*cmd, tmat->model);
    tmat->o_z = cmd->add_option("--z", tmat->z_re,
                                "real parts of z, comma separated "
                                "(default: -1)")
                    ->delimiter(',');
    tmat->o_zim = cmd->add_option("--z-im", tmat->z_im,
                                  "imaginary part shared by every z "
                                  "(default: 0)");
    cmd->callback([tmat, &rc] { rc = run_tmatrix(*tmat); });
  }

  // --- phase-shift -----------------------------------------------------------
  auto phase = std::make_shared<PhaseShiftOptions>();
  {
    CLI::App* cmd = app.add_subcommand(
        "phase-shift",
        "phase shift and effective-range function on a momentum grid");
    attach_common_options(*cmd, phase->common);
    attach_model_options(*cmd, phase->model);
    phase->o_p = cmd->add_option("--p", phase->p_list,
                                 "momenta, comma separated (overrides the "
                                 "log grid)")
                     ->delimiter(',');
    phase->o_lo = cmd->add_option("--p-lo", phase->p_lo,
                                  "log grid lower end (default: 0.01)");
    phase->o_hi = cmd->add_option("--p-hi", phase->p_hi,
                                  "log grid upper end (default: 10)");
    phase->o_n = cmd->add_option("--p-n", phase->p_n,
                                 "log grid point count (default: 25)");
    cmd->callback([phase, &rc] { rc = run_phase_shift(*phase); });
  }

  // --- cutoff-sweep ------------------------------------------------------------
  auto sweep = std::make_shared<CutoffSweepOptions>();
  {
    CLI::App* cmd = app.add_subcommand(
        "cutoff-sweep",
        "regulated contact amplitude across cutoffs, with errors against "
        "the limit");
    attach_common_options(*cmd, sweep->common);
    attach_model_options(*cmd, sweep->model);
    sweep->o_scheme = cmd->add_option(
        "--scheme", sweep->scheme,
        "regulator: sharp, gaussian, or dipole (default: sharp)");
    sweep->o_cutoffs = cmd->add_option("--cutoffs", sweep->cutoffs,
                                       "cutoff momenta, comma separated "
                                       "(default: 9 log-spaced in "
                                       "[1e1, 1e5])")
                           ->delimiter(',');
    sweep->o_z = cmd->add_option("--z", sweep->z_re,
                                 "real part of the energy (default: -1)");
    sweep->o_zim = cmd->add_option("--z-im", sweep->z_im,
                                   "imaginary part of the energy "
                                   "(default: 0)");
    cmd->callback([sweep, &rc] { rc = run_cutoff_sweep(*sweep); });
  }

  // --- tail-fit -----------------------------------------------------------------
  auto tail = std::make_shared<TailFitOptions>();
  {
    CLI::App* cmd = app.add_subcommand(
        "tail-fit",
        "fit the large-|z| amplitude tail and compare with the closed-form "
        "coefficients");
    attach_common_options(*cmd, tail->common);
    tail->o_alphas = cmd->add_option("--alpha-list", tail->alphas,
                                     "tail exponents to fit, comma separated "
                                     "(default: 0, 0.25)")
                         ->delimiter(',');
    tail->o_b2 = cmd->add_option("--b2", tail->b2,
                                 "second tail coefficient of the model "
                                 "(default: 1)");
    tail->o_mass = cmd->add_option("--mass", tail->mass,
                                   "dispersion mass m (default: 1)");
    cmd->callback([tail, &rc] { rc = run_tail_fit(*tail); });
  }

  // --- evolve -------------------------------------------------------------------
  auto evolve = std::make_shared<EvolveOptions>();
  {
    CLI::App* cmd = app.add_subcommand(
        "evolve",
        "apply the interaction-picture evolution operator to a wave packet");
    attach_common_options(*cmd, evolve->common);
    attach_model_options(*cmd, evolve->model);
    evolve->o_t = cmd->add_option("--t-list", evolve->t_list,
                                  "evaluation times, comma separated "
                                  "(default: 0.5, 1)")
                      ->delimiter(',');
    evolve->o_t0 = cmd->add_option("--t0", evolve->t0,
                                   "initial time (default: 0)");
    evolve->o_profile = cmd->add_option(
        "--profile", evolve->profile,
        "initial wave packet: gaussian or bump (default: gaussian)");
    evolve->o_kmax = cmd->add_option("--k-max", evolve->k_max,
                                     "momentum grid extent (default: 9)");
    evolve->o_density = cmd->add_option(
        "--density", evolve->density,
        "grid panel density multiplier (default: 0.3)");
    evolve->o_order = cmd->add_option(
        "--order", evolve->order,
        "Gauss points per grid panel (default: 3)");
    evolve->o_height = cmd->add_option(
        "--contour-height", evolve->contour_height,
        "energy-plane contour height (default: 1)");
    evolve->o_tail = cmd->add_option(
        "--tail-start", evolve->tail_start,
        "where the oscillatory line integral switches to its tail "
        "treatment (default: 40)");
    cmd->callback([evolve, &rc] { rc = run_evolve(*evolve); });
  }

  // --- scale-diagnostic ------------------------------------------------------------
  auto scale = std::make_shared<ScaleDiagnosticOptions>();
  {
    CLI::App* cmd = app.add_subcommand(
        "scale-diagnostic",
        "diagonal response and flatness statistics across state scales");
    attach_common_options(*cmd, scale->common);
    attach_model_options(*cmd, scale->model);
    scale->o_nu = cmd->add_option("--nu-list", scale->nu_list,
                                  "state scale factors >= 1, comma separated "
                                  "(default: 1, 2, 4)")
                      ->delimiter(',');
    scale->o_t = cmd->add_option("--t-list", scale->t_list,
                                 "evaluation times, comma separated "
                                 "(default: 0.5, 1, 2, 4)")
                     ->delimiter(',');
    scale->o_kmax = cmd->add_option("--k-max", scale->k_max,
                                    "base grid extent (default: 5.7)");
    scale->o_density = cmd->add_option(
        "--density", scale->density,
        "grid panel density multiplier (default: 1)");
    scale->o_order = cmd->add_option(
        "--order", scale->order, "Gauss points per grid panel (default: 7)");
    scale->o_height = cmd->add_option(
        "--contour-height", scale->contour_height,
        "energy-plane contour height (default: 1)");
    cmd->callback([scale, &rc] { rc = run_scale_diagnostic(*scale); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const sepdyn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
