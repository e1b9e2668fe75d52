#include "resetfp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include "resetfp/analytic.hpp"
#include "resetfp/bvp.hpp"
#include "resetfp/error.hpp"
#include "resetfp/ilt.hpp"
#include "resetfp/mc.hpp"
#include "resetfp/stats.hpp"

namespace resetfp::cli {
namespace {

using output::Cell;
using output::OutputRecord;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  double mu = 0.0;
  double r = 1.0;
  double xr = 1.0;
  std::vector<double> x{1.0};
  std::vector<double> z{2.0};
  std::vector<double> lambda{1.0};
  std::vector<double> t;
  double from = 0.0;
  double to = 0.0;
  std::size_t count = 100;
  int preset = 0;
  std::size_t n = 10000;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  double max_time = 1e6;
  bool bridge_correction = true;
  bool bridge_maximum = true;
  bool dump_samples = false;
  std::size_t grid_n = bvp::kDefaultGridN;
  double x_max = 0.0;
  std::string format = "csv";
  std::string out;
  std::vector<std::string> quantity;
  std::string scenario = "canonical";
  std::string engine = "exact";
};

std::string join(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += output::format_number(values[i]);
  }
  return s;
}

std::string join(const std::vector<std::string>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += values[i];
  }
  return s;
}

// Collects the provenance block: flags as "--name", run facts as bare keys.
class Metadata {
 public:
  explicit Metadata(OutputRecord& record) : record_(record) {}

  void flag(const std::string& name, double v) { record_.set("--" + name, output::format_number(v)); }
  void flag(const std::string& name, const std::vector<double>& v) { record_.set("--" + name, join(v)); }
  void flag(const std::string& name, const std::string& v) { record_.set("--" + name, v); }
  void flag(const std::string& name, bool v) { record_.set("--" + name, v ? "true" : "false"); }
  void flag_count(const std::string& name, std::uint64_t v) { record_.set("--" + name, std::to_string(v)); }
  void fact(const std::string& name, const std::string& v) { record_.set(name, v); }
  void fact(const std::string& name, double v) { record_.set(name, output::format_number(v)); }

 private:
  OutputRecord& record_;
};

ResetModel model_from(const Options& o) {
  if (!std::isfinite(o.mu)) throw UsageError("--mu must be finite");
  if (!std::isfinite(o.r) || o.r < 0.0) throw UsageError("--r must be finite and >= 0");
  if (!std::isfinite(o.xr) || o.xr <= 0.0) throw UsageError("--xr must be finite and > 0");
  return {o.mu, o.r, o.xr};
}

void check_positive(const std::vector<double>& values, const char* flag, bool allow_zero = false) {
  if (values.empty()) throw UsageError(std::string(flag) + " needs at least one value");
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0 || (!allow_zero && v == 0.0)) {
      throw UsageError(std::string(flag) + (allow_zero ? " values must be >= 0" : " values must be > 0"));
    }
  }
}

void model_flags(Metadata& meta, const Options& o) {
  meta.flag("mu", o.mu);
  meta.flag("r", o.r);
  meta.flag("xr", o.xr);
}

Cell maybe_cell(const Maybe<double>& v) {
  if (v.has_value()) return *v;
  return std::monostate{};
}

Cell reason_cell(const Maybe<double>& v) {
  if (v.has_value()) return std::monostate{};
  return v.reason();
}

std::vector<double> linspace(double from, double to, std::size_t count) {
  if (count < 2) throw UsageError("--count must be >= 2");
  if (!std::isfinite(from) || !std::isfinite(to) || !(to > from)) {
    throw UsageError("--from/--to must be finite with --to > --from");
  }
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = from + (to - from) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return grid;
}

bvp::SolveOptions solve_options(const Options& o, bool has_x_max) {
  if (o.grid_n < bvp::kMinGridN) throw UsageError("--grid-n must be >= 64");
  bvp::SolveOptions opts;
  opts.grid_n = o.grid_n;
  if (has_x_max) {
    if (!std::isfinite(o.x_max) || !(o.x_max > o.xr)) throw UsageError("--x-max must exceed --xr");
    opts.x_max = o.x_max;
  }
  return opts;
}

mc::SimConfig sim_config(const Options& o) {
  if (o.n == 0) throw UsageError("--n must be >= 1");
  if (o.threads == 0) throw UsageError("--threads must be >= 1");
  if (!(o.dt > 0.0 && o.dt <= 0.1)) throw UsageError("--dt must lie in (0, 0.1]");
  if (!(o.max_time > 0.0)) throw UsageError("--max-time must be > 0");
  mc::SimConfig c;
  c.n_samples = o.n;
  c.dt = o.dt;
  c.seed = o.seed;
  c.threads = o.threads;
  c.max_time = o.max_time;
  c.bridge_correction = o.bridge_correction;
  c.bridge_maximum = o.bridge_maximum;
  return c;
}

void sim_flags(Metadata& meta, const Options& o, bool path) {
  meta.flag_count("n", o.n);
  meta.flag_count("seed", o.seed);
  meta.flag_count("threads", o.threads);
  meta.flag("max-time", o.max_time);
  if (path) {
    meta.flag("dt", o.dt);
    meta.flag("bridge-correction", o.bridge_correction);
    meta.flag("bridge-maximum", o.bridge_maximum);
  }
}

// ---------------------------------------------------------------------------

OutputRecord cmd_moments(const Options& o) {
  const ResetModel model = model_from(o);
  check_positive(o.x, "--x", true);
  OutputRecord rec;
  Metadata meta(rec);
  meta.fact("command", "moments");
  model_flags(meta, o);
  meta.flag("x", o.x);
  rec.columns = {"quantity", "x", "value", "reason"};
  for (double x : o.x) {
    const analytic::PassageMoments m = analytic::passage_moments(model, x);
    auto row = [&](const char* name, Cell value, Cell reason = std::monostate{}) {
      rec.rows.push_back({std::string(name), x, std::move(value), std::move(reason)});
    };
    row("mean_tau", m.mean_tau);
    row("second_tau", m.second_tau);
    row("var_tau", m.var_tau);
    row("mean_area", m.mean_area);
    row("second_area", maybe_cell(m.second_area), reason_cell(m.second_area));
    row("var_area", maybe_cell(m.var_area), reason_cell(m.var_area));
    row("joint", maybe_cell(m.joint_tau_area), reason_cell(m.joint_tau_area));
    row("cov", maybe_cell(m.cov), reason_cell(m.cov));
    row("corr", maybe_cell(m.corr), reason_cell(m.corr));
  }
  return rec;
}

// ---------------------------------------------------------------------------

const std::vector<std::string> kSweepQuantities = {
    "mean_tau", "second_tau", "var_tau", "mean_area", "second_area",
    "var_area", "joint",      "corr",    "maxdispl_cdf", "maxdispl_pdf"};

bool over_z(const std::string& q) { return q == "maxdispl_cdf" || q == "maxdispl_pdf"; }

Maybe<double> sweep_value(const std::string& q, const ResetModel& model, double x, double a) {
  if (q == "maxdispl_cdf") return analytic::maxdispl_cdf(model, x, a);
  if (q == "maxdispl_pdf") return analytic::maxdispl_pdf(model, x, a);
  if (q == "mean_tau") return analytic::fpt_mean(model, a);
  if (q == "second_tau") return analytic::fpt_second_moment(model, a);
  if (q == "mean_area") return analytic::fpa_mean(model, a);
  if (q == "second_area") return analytic::fpa_second_moment(model, a);
  if (q == "joint") return analytic::joint_moment_tau_area(model, a);
  if (q == "corr") return analytic::correlation_tau_area(model, a);
  const analytic::PassageMoments m = analytic::passage_moments(model, a);
  if (q == "var_tau") return m.var_tau;
  return m.var_area;
}

struct SweepPreset {
  std::vector<std::string> quantity;
  ResetModel model;
  double x = 1.0;  // start point for the maximum-displacement curves
};

SweepPreset sweep_preset(int preset) {
  const ResetModel unit{0.0, 1.0, 1.0};
  switch (preset) {
    case 1: return {{"mean_tau"}, unit};
    case 2: return {{"second_tau"}, unit};
    case 3: return {{"var_tau"}, unit};
    case 4: return {{"mean_area"}, unit};
    case 5: return {{"second_area"}, unit};
    case 6: return {{"var_area"}, unit};
    case 7: return {{"corr"}, unit};
    case 8: return {{"corr"}, {0.0, 1.0, 2.0}};
    case 9: return {{"maxdispl_cdf", "maxdispl_pdf"}, {0.0, 1.0, 0.5}, 1.0};
    default: throw UsageError("--preset must be between 1 and 9");
  }
}

OutputRecord cmd_sweep(Options o, const CLI::App& app) {
  if (o.preset != 0) {
    const SweepPreset preset = sweep_preset(o.preset);
    o.quantity = preset.quantity;
    o.mu = preset.model.mu;
    o.r = preset.model.r;
    o.xr = preset.model.x_reset;
    o.x = {preset.x};
  }
  if (o.quantity.empty()) throw UsageError("--quantity or --preset is required");
  bool any_z = false, any_x = false;
  for (const auto& q : o.quantity) {
    if (std::find(kSweepQuantities.begin(), kSweepQuantities.end(), q) == kSweepQuantities.end()) {
      throw UsageError("unknown --quantity '" + q + "'");
    }
    (over_z(q) ? any_z : any_x) = true;
  }
  if (any_z && any_x) throw UsageError("--quantity cannot mix x-sweeps and z-sweeps");
  const ResetModel model = model_from(o);
  check_positive(o.x, "--x");
  const double x = o.x.front();
  if (app.count("--from") == 0) o.from = any_z ? x : 0.1;
  if (app.count("--to") == 0) o.to = any_z ? x + 4.0 : 10.0;
  const std::vector<double> grid = linspace(o.from, o.to, o.count);

  OutputRecord rec;
  Metadata meta(rec);
  meta.fact("command", "sweep");
  meta.flag("quantity", join(o.quantity));
  model_flags(meta, o);
  if (any_z) meta.flag("x", std::vector<double>{x});
  meta.flag("from", o.from);
  meta.flag("to", o.to);
  meta.flag_count("count", o.count);
  if (o.preset != 0) meta.flag_count("preset", static_cast<std::uint64_t>(o.preset));
  const std::string axis = any_z ? "z" : "x";
  rec.columns = {"quantity", axis, "value", "reason"};
  for (const auto& q : o.quantity) {
    for (double a : grid) {
      if (!any_z && a < 0.0) throw UsageError("x grid must be >= 0");
      const Maybe<double> v = sweep_value(q, model, x, a);
      rec.rows.push_back({q, a, maybe_cell(v), reason_cell(v)});
    }
  }
  return rec;
}

// ---------------------------------------------------------------------------

OutputRecord cmd_simulate(const Options& o) {
  const ResetModel model = model_from(o);
  check_positive(o.x, "--x");
  if (o.x.size() != 1) throw UsageError("simulate takes a single --x");
  check_positive(o.lambda, "--lambda", true);
  if (o.engine != "exact" && o.engine != "path") throw UsageError("--engine must be exact or path");
  const bool path = o.engine == "path";
  const mc::Engine engine = path ? mc::Engine::Path : mc::Engine::Exact;
  const mc::SampleBatch batch = mc::simulate(engine, model, o.x.front(), sim_config(o));

  OutputRecord rec;
  Metadata meta(rec);
  meta.fact("command", "simulate");
  meta.flag("engine", o.engine);
  model_flags(meta, o);
  meta.flag("x", o.x);
  sim_flags(meta, o, path);
  meta.flag("lambda", o.lambda);
  if (path) meta.flag("z", o.z);
  meta.flag("dump-samples", o.dump_samples);
  meta.fact("horizon_exceeded", std::to_string(batch.horizon_exceeded));

  if (o.dump_samples) {
    if (path) {
      rec.columns = {"sample", "tau", "area", "max_displ"};
      for (std::size_t i = 0; i < batch.size(); ++i) {
        rec.rows.push_back({static_cast<double>(i), batch.tau[i], batch.area[i], batch.max_displ[i]});
      }
    } else {
      rec.columns = {"sample", "tau", "absorbed_first_cycle"};
      for (std::size_t i = 0; i < batch.size(); ++i) {
        rec.rows.push_back({static_cast<double>(i), batch.tau[i],
                            static_cast<double>(batch.absorbed_first_cycle[i])});
      }
    }
    return rec;
  }

  rec.columns = {"quantity", "parameter", "estimate", "std_error", "ci_low", "ci_high", "n"};
  auto row = [&](const std::string& name, Cell parameter, const stats::SummaryStats& s) {
    rec.rows.push_back({name, std::move(parameter), s.estimate, s.std_error, s.ci_low, s.ci_high,
                        static_cast<double>(s.n)});
  };
  auto functional = [&](const char* name, const mc::Functional& f, Cell parameter = std::monostate{}) {
    row(name, std::move(parameter), mc::estimate(batch, f));
  };
  functional("mean_tau", mc::Functional::mean_tau());
  functional("second_tau", mc::Functional::second_tau());
  for (double l : o.lambda) functional("lt_tau", mc::Functional::lt(l), l);
  if (!path) {
    functional("absorbed_first_cycle", mc::Functional::absorbed_first_cycle());
    return rec;
  }
  functional("mean_area", mc::Functional::mean_area());
  functional("second_area", mc::Functional::second_area());
  functional("joint", mc::Functional::joint());
  row("corr", std::monostate{}, mc::sample_correlation(batch));
  for (double l : o.lambda) functional("lt_area", mc::Functional::lt_area(l), l);
  for (double z : o.z) functional("cdf_max", mc::Functional::cdf_max(z), z);
  return rec;
}

// ---------------------------------------------------------------------------

OutputRecord cmd_bvp(const Options& o, const CLI::App& app) {
  const ResetModel model = model_from(o);
  check_positive(o.x, "--x", true);
  if (o.quantity.size() != 1) throw UsageError("bvp takes exactly one --quantity");
  const std::string& q = o.quantity.front();
  const bvp::SolveOptions opts = solve_options(o, app.count("--x-max") > 0);

  OutputRecord rec;
  Metadata meta(rec);
  meta.fact("command", "bvp");
  meta.flag("quantity", q);
  model_flags(meta, o);
  meta.flag("x", o.x);
  meta.flag_count("grid-n", o.grid_n);
  if (opts.x_max) meta.flag("x-max", *opts.x_max);
  rec.columns = {"quantity", "x", "lambda", "value", "coupling", "residual_max", "h", "x_max"};

  if (q == "fpt-lt" || q == "fpa-lt") {
    check_positive(o.lambda, "--lambda", true);
    meta.flag("lambda", o.lambda);
    const bvp::Potential potential = q == "fpt-lt" ? bvp::Potential{1.0, 0.0} : bvp::Potential{0.0, 1.0};
    const double x_needed = *std::max_element(o.x.begin(), o.x.end());
    for (double l : o.lambda) {
      const bvp::GridSolution sol = bvp::transform_solution(model, potential, l, opts, x_needed);
      for (double x : o.x) {
        rec.rows.push_back({q, x, l, sol.at(x), sol.coupling, sol.residual_max, sol.h, sol.grid.back()});
      }
    }
    return rec;
  }

  bvp::MomentKind kind;
  int order = 1;
  if (q == "fpt-1" || q == "fpt-2") {
    kind = bvp::MomentKind::Fpt;
  } else if (q == "fpa-1" || q == "fpa-2") {
    kind = bvp::MomentKind::Fpa;
  } else if (q == "joint") {
    kind = bvp::MomentKind::Joint;
  } else {
    throw UsageError("unknown --quantity '" + q + "'");
  }
  if (q.back() == '2') order = 2;
  const bvp::MomentSolution m = bvp::moment_solve(model, kind, order, o.x, opts);
  meta.fact("numeric_only", m.numeric_only ? "true" : "false");
  meta.fact("closure_extrapolated", m.closure_extrapolated ? "true" : "false");
  for (std::size_t i = 0; i < o.x.size(); ++i) {
    rec.rows.push_back({q, o.x[i], std::monostate{}, m.values[i], m.solution.coupling,
                        m.solution.residual_max, m.solution.h, m.solution.grid.back()});
  }
  return rec;
}

// ---------------------------------------------------------------------------

OutputRecord cmd_density(Options o, const CLI::App& app) {
  const ResetModel model = model_from(o);
  check_positive(o.x, "--x");
  if (o.x.size() != 1) throw UsageError("density takes a single --x");
  OutputRecord rec;
  Metadata meta(rec);
  meta.fact("command", "density");
  model_flags(meta, o);
  meta.flag("x", o.x);
  std::vector<double> times = o.t;
  if (times.empty()) {
    if (app.count("--from") == 0 || app.count("--to") == 0) {
      throw UsageError("density needs --t or --from/--to");
    }
    times = linspace(o.from, o.to, o.count);
    meta.flag("from", o.from);
    meta.flag("to", o.to);
    meta.flag_count("count", o.count);
  } else {
    meta.flag("t", o.t);
  }
  const ilt::DensityCurve curve = ilt::invert_fpt_density(model, o.x.front(), times);
  meta.fact("nodes", std::to_string(ilt::kDefaultNodes));
  meta.fact("mass_check", curve.mass_check);
  rec.columns = {"t", "density", "cdf", "digits"};
  for (std::size_t i = 0; i < times.size(); ++i) {
    rec.rows.push_back({curve.times[i], curve.density[i], curve.cdf[i], curve.digits[i]});
  }
  return rec;
}

// ---------------------------------------------------------------------------

struct Scenario {
  ResetModel model;
  double x = 1.0;
  std::vector<double> max_z;  // maximum-displacement CDF checkpoints
};

Scenario scenario_named(const std::string& name) {
  if (name == "canonical") return {{0.0, 1.0, 1.0}, 1.0, {}};
  if (name == "drifted") return {{-1.0, 1.0, 1.0}, 1.0, {}};
  if (name == "fig9") return {{0.0, 1.0, 0.5}, 1.0, {1.5, 2.0, 3.0}};
  throw UsageError("unknown --scenario '" + name + "' (canonical, drifted, fig9)");
}

class Report {
 public:
  explicit Report(OutputRecord& rec) : rec_(rec) {
    rec_.columns = {"label", "reference", "engine", "reference_value", "value", "abs_err",
                    "rel_err", "n_sigma", "std_error", "tolerance", "verdict"};
  }

  void add(const std::string& reference, const std::string& engine, const stats::ComparisonRecord& c) {
    rec_.rows.push_back({c.label, reference, engine, c.analytic_value, c.numeric_value, c.abs_err,
                         c.rel_err, c.n_sigma ? Cell(*c.n_sigma) : Cell(std::monostate{}),
                         c.std_error, c.tolerance, std::string(c.pass ? "pass" : "fail")});
    if (!c.pass) ++failures_;
  }

  int failures() const { return failures_; }

 private:
  OutputRecord& rec_;
  int failures_ = 0;
};

OutputRecord cmd_compare(const Options& o, int& failures) {
  const Scenario sc = scenario_named(o.scenario);
  const ResetModel& model = sc.model;
  const double x = sc.x;
  if (o.grid_n < bvp::kMinGridN) throw UsageError("--grid-n must be >= 64");
  bvp::SolveOptions opts;
  opts.grid_n = o.grid_n;
  const mc::SimConfig config = sim_config(o);
  const double lambda = 1.0;

  OutputRecord rec;
  Metadata meta(rec);
  meta.fact("command", "compare");
  meta.flag("scenario", o.scenario);
  meta.flag_count("n", o.n);
  meta.flag("dt", o.dt);
  meta.flag_count("seed", o.seed);
  meta.flag_count("threads", o.threads);
  meta.flag_count("grid-n", o.grid_n);
  meta.fact("mu", output::format_number(model.mu));
  meta.fact("r", output::format_number(model.r));
  meta.fact("xr", output::format_number(model.x_reset));
  meta.fact("x", output::format_number(x));
  Report report(rec);

  const bool driftless = model.mu == 0.0;
  const double xs[] = {x};
  auto bvp_moment = [&](bvp::MomentKind kind, int order) {
    return bvp::moment_solve(model, kind, order, xs, opts).values.front();
  };
  const double t1 = bvp_moment(bvp::MomentKind::Fpt, 1);
  const double t2 = bvp_moment(bvp::MomentKind::Fpt, 2);
  const double a1 = bvp_moment(bvp::MomentKind::Fpa, 1);
  const double a2 = bvp_moment(bvp::MomentKind::Fpa, 2);
  const double j = bvp_moment(bvp::MomentKind::Joint, 1);
  const double bvp_corr = (j - t1 * a1) / std::sqrt((t2 - t1 * t1) * (a2 - a1 * a1));
  const double bvp_fpa_lt = bvp::fpa_lt(model, x, lambda, opts);

  // analytic against the finite-difference solver
  const analytic::PassageMoments m = analytic::passage_moments(model, x);
  const double lt = analytic::fpt_lt(model, x, lambda);
  report.add("analytic", "bvp", stats::compare(lt, bvp::fpt_lt(model, x, lambda, opts), 1e-5, "fpt_lt(1)"));
  report.add("analytic", "bvp", stats::compare(m.mean_tau, t1, 1e-5, "mean_tau"));
  report.add("analytic", "bvp", stats::compare(m.second_tau, t2, 1e-4, "second_tau"));
  report.add("analytic", "bvp", stats::compare(m.mean_area, a1, 1e-5, "mean_area"));
  if (driftless) {
    report.add("analytic", "bvp", stats::compare(*m.second_area, a2, 1e-4, "second_area"));
    report.add("analytic", "bvp", stats::compare(*m.joint_tau_area, j, 1e-4, "joint"));
  }

  // exact sampler
  const mc::SampleBatch exact = mc::sample_fpt_exact(model, x, config);
  meta.fact("horizon_exceeded_exact", std::to_string(exact.horizon_exceeded));
  // P(hit before the first reset) = E[e^{-r T}], the no-reset transform at r
  const double first_cycle = std::exp(-x * decay_exponent(model, 0.0));
  report.add("analytic", "mc-exact", stats::compare(m.mean_tau, mc::estimate(exact, mc::Functional::mean_tau()), 1e-3, "mean_tau"));
  report.add("analytic", "mc-exact", stats::compare(m.second_tau, mc::estimate(exact, mc::Functional::second_tau()), 1e-3, "second_tau"));
  report.add("analytic", "mc-exact", stats::compare(lt, mc::estimate(exact, mc::Functional::lt(lambda)), 1e-3, "fpt_lt(1)"));
  report.add("analytic", "mc-exact", stats::compare(first_cycle, mc::estimate(exact, mc::Functional::absorbed_first_cycle()), 1e-3, "absorbed_first_cycle"));

  // path sampler; its O(dt) biases are covered by percent-level tolerances
  const mc::SampleBatch path = mc::sample_path(model, x, config);
  meta.fact("horizon_exceeded_path", std::to_string(path.horizon_exceeded));
  auto path_estimate = [&](const mc::Functional& f) { return mc::estimate(path, f); };
  const stats::SummaryStats rho = mc::sample_correlation(path);
  report.add("analytic", "mc-path", stats::compare(m.mean_tau, path_estimate(mc::Functional::mean_tau()), 0.01, "mean_tau"));
  report.add("analytic", "mc-path", stats::compare(m.mean_area, path_estimate(mc::Functional::mean_area()), 0.01, "mean_area"));
  if (driftless) {
    report.add("analytic", "mc-path", stats::compare(*m.second_area, path_estimate(mc::Functional::second_area()), 0.02, "second_area"));
    report.add("analytic", "mc-path", stats::compare(*m.joint_tau_area, path_estimate(mc::Functional::joint()), 0.02, "joint"));
    report.add("analytic", "mc-path", stats::compare(*m.corr, rho, 0.05 / *m.corr, "corr"));
  } else {
    report.add("bvp", "mc-path", stats::compare(a2, path_estimate(mc::Functional::second_area()), 0.02, "second_area"));
    report.add("bvp", "mc-path", stats::compare(j, path_estimate(mc::Functional::joint()), 0.02, "joint"));
    report.add("bvp", "mc-path", stats::compare(bvp_corr, rho, 0.05 / bvp_corr, "corr"));
  }
  report.add("bvp", "mc-path", stats::compare(bvp_fpa_lt, path_estimate(mc::Functional::lt_area(lambda)), 0.01, "fpa_lt(1)"));
  for (double z : sc.max_z) {
    report.add("analytic", "mc-path",
               stats::compare(analytic::maxdispl_cdf(model, x, z), path_estimate(mc::Functional::cdf_max(z)), 0.01,
                              "cdf_max(" + output::format_number(z) + ")"));
  }
  failures = report.failures();
  meta.fact("failures", std::to_string(failures));
  return rec;
}

// ---------------------------------------------------------------------------

void emit(const OutputRecord& rec, const Options& o, std::ostream& out) {
  const std::string text = output::write(rec, o.format == "json" ? output::Format::Json : output::Format::Csv);
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file || !(file << text)) throw UsageError("cannot write --out file '" + o.out + "'");
}

void add_model(CLI::App* cmd, Options& o) {
  cmd->add_option("--mu", o.mu, "drift")->capture_default_str();
  cmd->add_option("--r", o.r, "reset rate")->capture_default_str();
  cmd->add_option("--xr", o.xr, "reset position")->capture_default_str();
}

void add_output(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--out", o.out, "output file (default: standard output)");
}

void add_sim(CLI::App* cmd, Options& o) {
  cmd->add_option("--n", o.n, "number of samples")->capture_default_str();
  cmd->add_option("--dt", o.dt, "time step of the path engine")->capture_default_str();
  cmd->add_option("--seed", o.seed, "random seed")->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker threads (results do not depend on it)");
}

CLI::Option* add_list(CLI::App* cmd, const std::string& name, std::vector<double>& target,
                      const std::string& help) {
  return cmd->add_option(name, target, help)->delimiter(',')->expected(1, -1);
}

CLI::Option* add_names(CLI::App* cmd, const std::string& name, std::vector<std::string>& target,
                       const std::string& help) {
  return cmd->add_option(name, target, help)->delimiter(',')->expected(1, -1);
}

int exit_code_for(const Error& e) { return e.is_numeric() ? kNumeric : kUsage; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"First-passage quantities of Brownian motion with stochastic resetting", "resetfp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  auto* moments = app.add_subcommand("moments", "closed-form moments at the given x values");
  add_model(moments, o);
  add_list(moments, "--x", o.x, "start points");
  add_output(moments, o);

  auto* sweep = app.add_subcommand("sweep", "a quantity along a grid, plot-ready");
  add_model(sweep, o);
  add_names(sweep, "--quantity", o.quantity,
            "mean_tau, second_tau, var_tau, mean_area, second_area, var_area, joint, corr, "
            "maxdispl_cdf, maxdispl_pdf");
  add_list(sweep, "--x", o.x, "start point for maxdispl sweeps");
  sweep->add_option("--from", o.from, "first grid value");
  sweep->add_option("--to", o.to, "last grid value");
  sweep->add_option("--count", o.count, "grid points")->capture_default_str();
  sweep->add_option("--preset", o.preset, "preset curve 1-9: quantity and parameters");
  add_output(sweep, o);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates");
  add_model(simulate, o);
  add_list(simulate, "--x", o.x, "start point");
  simulate->add_option("--engine", o.engine, "exact or path")
      ->check(CLI::IsMember({"exact", "path"}))
      ->capture_default_str();
  add_sim(simulate, o);
  simulate->add_option("--max-time", o.max_time, "per-sample time horizon")->capture_default_str();
  simulate->add_option("--bridge-correction", o.bridge_correction, "bridge absorption test (path)");
  simulate->add_option("--bridge-maximum", o.bridge_maximum, "bridge-sampled step maximum (path)");
  add_list(simulate, "--lambda", o.lambda, "Laplace variables");
  add_list(simulate, "--z", o.z, "levels for P(M <= z) (path)");
  simulate->add_option("--dump-samples", o.dump_samples, "emit the raw samples");
  add_output(simulate, o);

  auto* solver = app.add_subcommand("bvp", "finite-difference transforms and moments");
  add_model(solver, o);
  add_names(solver, "--quantity", o.quantity, "fpt-lt, fpa-lt, fpt-1, fpt-2, fpa-1, fpa-2, joint")
      ->required();
  add_list(solver, "--x", o.x, "abscissae");
  add_list(solver, "--lambda", o.lambda, "Laplace variables (transforms)");
  solver->add_option("--grid-n", o.grid_n, "nominal grid intervals")->capture_default_str();
  solver->add_option("--x-max", o.x_max, "right end of the truncated domain");
  add_output(solver, o);

  auto* density = app.add_subcommand("density", "first-passage density by Laplace inversion");
  add_model(density, o);
  add_list(density, "--x", o.x, "start point");
  add_list(density, "--t", o.t, "times");
  density->add_option("--from", o.from, "first time");
  density->add_option("--to", o.to, "last time");
  density->add_option("--count", o.count, "time points")->capture_default_str();
  add_output(density, o);

  auto* compare = app.add_subcommand("compare", "analytic / bvp / Monte Carlo consistency report");
  compare->add_option("--scenario", o.scenario, "canonical, drifted or fig9")->capture_default_str();
  add_sim(compare, o);
  compare->add_option("--grid-n", o.grid_n, "nominal grid intervals")->capture_default_str();
  add_output(compare, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    OutputRecord rec;
    int failures = 0;
    if (moments->parsed()) {
      rec = cmd_moments(o);
    } else if (sweep->parsed()) {
      rec = cmd_sweep(o, *sweep);
    } else if (simulate->parsed()) {
      rec = cmd_simulate(o);
    } else if (solver->parsed()) {
      rec = cmd_bvp(o, *solver);
    } else if (density->parsed()) {
      rec = cmd_density(o, *density);
    } else {
      rec = cmd_compare(o, failures);
    }
    rec.set("--format", o.format);
    rec.set("tool_version", std::string(kToolVersion));
    emit(rec, o, out);
    if (failures > 0) {
      err << failures << " comparison(s) failed\n";
      return kComparisonFailure;
    }
    return kOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << (e.is_numeric() ? "numeric failure: " : "error: ") << e.what() << '\n';
    return exit_code_for(e);
  }
}

std::vector<std::string> rerun_args(const output::OutputRecord& record) {
  const auto command = record.get("command");
  if (!command) throw Error(Errc::InvalidArgument, "record has no command entry");
  std::vector<std::string> args{*command};
  for (const auto& [key, value] : record.metadata) {
    if (key.rfind("--", 0) == 0) {
      args.push_back(key);
      args.push_back(value);
    }
  }
  return args;
}

}  // namespace resetfp::cli
