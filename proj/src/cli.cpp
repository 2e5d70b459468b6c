#include "wpc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>
#include <variant>

#include "wpc/analysis.hpp"
#include "wpc/ehmodel.hpp"
#include "wpc/error.hpp"
#include "wpc/mcsim.hpp"
#include "wpc/numerics.hpp"
#include "wpc/scenario.hpp"

namespace wpc::cli {

namespace {

using analysis::SystemParams;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
  workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < n; i = next++) body(i);
  };
  if (workers <= 1) {
    loop();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(loop);
}

// Options every scenario-driven subcommand understands.
struct CommonOptions {
  std::string scenario_file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;
  std::string out_path;
  unsigned threads = 0;

  void attach(CLI::App* app) {
    app->add_option("--scenario", scenario_file, "scenario file of 'key = value' lines");
    app->add_option("--set", sets, "override a scenario key, KEY=VALUE (repeatable)");
    for (std::string_view key : scenario::setting_keys()) {
      std::string flag(key);
      std::replace(flag.begin(), flag.end(), '_', '-');
      app->add_option("--" + flag, flags[std::string(key)], "scenario key '" + std::string(key) + "'");
    }
    app->add_option("--out", out_path, "output CSV path (default: stdout)");
    app->add_option("--threads", threads, "worker threads (default: $WPC_THREADS or all cores)");
  }

  // Flags override scenario-file keys, which override the built-in defaults.
  scenario::Scenario resolve() const {
    scenario::Scenario s = scenario::default_scenario();
    if (!scenario_file.empty()) s = scenario::load_scenario(scenario_file, s);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
      scenario::apply_setting(s, kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& [key, value] : flags)
      if (!value.empty()) scenario::apply_setting(s, key, value);
    return s;
  }

  unsigned workers() const { return threads > 0 ? threads : mcsim::default_workers(); }
};

struct McOptions {
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  std::int64_t batch = 65'536;

  void attach(CLI::App* app) {
    app->add_option("--samples", samples, "Monte Carlo trials")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Monte Carlo seed");
    app->add_option("--batch", batch, "trials per work unit")->check(CLI::PositiveNumber);
  }

  mcsim::SimConfig config() const { return {samples, seed, batch}; }
};

// Collects the CSV in memory; written out once the run is complete or has
// failed part-way.
class CsvDoc {
public:
  void comment(const std::string& line) { text_ << "# " << line << '\n'; }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) text_ << (i ? "," : "") << cells[i];
    text_ << '\n';
  }
  void preamble(std::string_view command, const scenario::Scenario* s,
                const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    comment(std::string(kVersion));
    comment("command = " + std::string(command));
    if (s != nullptr)
      for (const auto& [k, v] : scenario::describe(*s)) comment(k + " = " + v);
    for (const auto& [k, v] : extra) comment(k + " = " + v);
  }
  void flush(const std::string& path, std::ostream& out) const {
    if (path.empty()) {
      out << text_.str();
      out.flush();
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write output file: " + path);
    f << text_.str();
  }

private:
  std::ostringstream text_;
};

enum class Metric { outage, throughput };

const std::vector<std::string> kMethods = {"quadrature", "series", "asymptotic", "montecarlo",
                                           "upper_bound"};

std::vector<std::string> parse_methods(const std::string& text) {
  auto methods = split_list(text);
  if (methods.empty()) throw ConfigError("--methods is empty");
  for (const auto& m : methods)
    if (std::find(kMethods.begin(), kMethods.end(), m) == kMethods.end())
      throw ConfigError("unknown method '" + m + "'");
  return methods;
}

struct PointResult {
  std::vector<double> outage;
  std::vector<std::string> notes;
  std::string failure;
};

// Outage per requested method. Series-path guard trips become NaN plus a
// note; quadrature or solver failures abort the point.
PointResult evaluate_point(const SystemParams& p, const std::vector<std::string>& methods,
                           const mcsim::SimConfig& mc, unsigned mc_workers) {
  PointResult r;
  for (const auto& m : methods) {
    double value = std::numeric_limits<double>::quiet_NaN();
    if (m == "quadrature") value = analysis::outage_quadrature(p).value;
    else if (m == "asymptotic") value = analysis::outage_asymptotic(p).value;
    else if (m == "upper_bound") value = 0.0;
    else if (m == "montecarlo") value = mcsim::simulate(p, mc, mc_workers).outage;
    else if (m == "series") {
      try {
        value = analysis::outage_series(p).value;
      } catch (const PrecisionError& e) {
        r.notes.push_back(std::string("series unavailable: ") + e.what());
      } catch (const DomainError& e) {
        r.notes.push_back(std::string("series unavailable: ") + e.what());
      }
    }
    r.outage.push_back(value);
  }
  return r;
}

double to_metric(const SystemParams& p, double outage, Metric metric) {
  if (metric == Metric::outage || std::isnan(outage)) return outage;
  return p.rate * (1.0 - p.tau) * (1.0 - outage);
}

std::vector<double> make_grid(double start, double stop, int points, bool log_scale) {
  if (!(start < stop)) throw ConfigError("--start must be below --stop");
  if (points < 2) throw ConfigError("--points must be at least 2");
  if (log_scale && !(start > 0.0)) throw ConfigError("log scale needs a positive --start");
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    grid[i] = log_scale ? start * std::pow(stop / start, t) : start + t * (stop - start);
  }
  grid.back() = stop;
  return grid;
}

void apply_axis(scenario::Scenario& s, const std::string& axis, double v) {
  auto as_int = [&](int& slot) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9 || r < 1) throw ConfigError("axis " + axis + " needs integer grid points >= 1");
    slot = static_cast<int>(r);
  };
  if (axis == "pt_dbm") s.pt_w = scenario::dbm_to_watts(v);
  else if (axis == "rate") s.rate = v;
  else if (axis == "tau") {
    if (!(v > 0.0 && v < 1.0)) throw ConfigError("tau grid must stay inside (0, 1)");
    s.tau = v;
  } else if (axis == "n1") as_int(s.n1);
  else if (axis == "n2") as_int(s.n2);
  else if (axis == "m1") as_int(s.m1);
  else if (axis == "m2") as_int(s.m2);
  else throw ConfigError("unknown axis '" + axis + "'");
}

int cmd_eval(const CommonOptions& common, const McOptions& mc, const std::string& methods_text,
             std::ostream& out) {
  const auto s = common.resolve();
  const auto methods = parse_methods(methods_text);
  const SystemParams p = scenario::to_system_params(s);
  const PointResult r = evaluate_point(p, methods, mc.config(), common.workers());

  CsvDoc doc;
  std::vector<std::pair<std::string, std::string>> extra = {{"methods", methods_text}};
  if (std::find(methods.begin(), methods.end(), "montecarlo") != methods.end()) {
    extra.emplace_back("samples", std::to_string(mc.samples));
    extra.emplace_back("seed", std::to_string(mc.seed));
    extra.emplace_back("batch", std::to_string(mc.batch));
  }
  doc.preamble("eval", &s, extra);
  for (const auto& note : r.notes) doc.comment(note);
  std::vector<std::string> header, cells;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    header.push_back("outage_" + methods[i]);
    header.push_back("throughput_" + methods[i]);
    cells.push_back(num(r.outage[i]));
    cells.push_back(num(to_metric(p, r.outage[i], Metric::throughput)));
  }
  doc.row(header);
  doc.row(cells);
  doc.flush(common.out_path, out);
  return kExitOk;
}

struct SweepOptions {
  std::string axis;
  double start = 0.0;
  double stop = 0.0;
  int points = 2;
  std::string scale = "linear";
  std::string methods = "quadrature,asymptotic";
  std::string metric;
};

int cmd_sweep(const CommonOptions& common, const McOptions& mc, const SweepOptions& o,
              std::ostream& out, std::ostream& err) {
  const auto base = common.resolve();
  const auto methods = parse_methods(o.methods);
  if (o.scale != "linear" && o.scale != "log") throw ConfigError("--scale must be linear or log");
  const auto grid = make_grid(o.start, o.stop, o.points, o.scale == "log");

  Metric metric = (o.axis == "rate" || o.axis == "tau") ? Metric::throughput : Metric::outage;
  if (o.metric == "outage") metric = Metric::outage;
  else if (o.metric == "throughput") metric = Metric::throughput;
  else if (!o.metric.empty()) throw ConfigError("--metric must be outage or throughput");

  // Resolve every grid point up front so configuration errors surface
  // before any numerical work.
  std::vector<SystemParams> params;
  for (double v : grid) {
    scenario::Scenario s = base;
    apply_axis(s, o.axis, v);
    params.push_back(scenario::to_system_params(s));
  }

  std::vector<PointResult> results(grid.size());
  std::vector<std::exception_ptr> config_errors(grid.size());
  parallel_for(grid.size(), common.workers(), [&](std::size_t i) {
    try {
      results[i] = evaluate_point(params[i], methods, mc.config(), 1);
    } catch (const ConfigError&) {
      config_errors[i] = std::current_exception();
    } catch (const ModelMismatchError&) {
      config_errors[i] = std::current_exception();
    } catch (const std::exception& e) {
      results[i].failure = e.what();
    }
  });
  for (const auto& e : config_errors)
    if (e) std::rethrow_exception(e);

  const std::string metric_name = metric == Metric::outage ? "outage" : "throughput";
  CsvDoc doc;
  std::vector<std::pair<std::string, std::string>> extra = {
      {"axis", o.axis},         {"start", num(o.start)},  {"stop", num(o.stop)},
      {"points", std::to_string(o.points)}, {"scale", o.scale}, {"methods", o.methods},
      {"metric", metric_name}};
  if (std::find(methods.begin(), methods.end(), "montecarlo") != methods.end()) {
    extra.emplace_back("samples", std::to_string(mc.samples));
    extra.emplace_back("seed", std::to_string(mc.seed));
    extra.emplace_back("batch", std::to_string(mc.batch));
  }
  doc.preamble("sweep", &base, extra);

  std::vector<std::string> header = {o.axis};
  for (const auto& m : methods) header.push_back(metric_name + "_" + m);
  doc.row(header);

  int status = kExitOk;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& r = results[i];
    if (!r.failure.empty()) {
      doc.comment("FAILED at " + o.axis + " = " + num(grid[i]) + ": " + r.failure);
      status = kExitNumerical;
      continue;
    }
    std::vector<std::string> cells = {num(grid[i])};
    for (double v : r.outage) cells.push_back(num(to_metric(params[i], v, metric)));
    doc.row(cells);
    for (const auto& note : r.notes) doc.comment(o.axis + " = " + num(grid[i]) + ": " + note);
  }
  doc.flush(common.out_path, out);
  if (status != kExitOk) err << "sweep: numerical failure at one or more grid points (see FAILED lines)\n";
  return status;
}

int cmd_mc(const CommonOptions& common, const McOptions& mc, std::ostream& out) {
  const auto s = common.resolve();
  const SystemParams p = scenario::to_system_params(s);
  const auto r = mcsim::simulate(p, mc.config(), common.workers());
  CsvDoc doc;
  doc.preamble("mc", &s,
               {{"samples", std::to_string(mc.samples)},
                {"seed", std::to_string(mc.seed)},
                {"batch", std::to_string(mc.batch)}});
  if (r.ci_warning) doc.comment("warning: normal-approximation CI unreliable (n min(p, 1-p) < 20)");
  doc.row({"n_samples", "seed", "outage", "ci95_halfwidth", "std_error", "mean_harvested_w",
           "mean_snr_db", "throughput"});
  doc.row({std::to_string(r.n_samples), std::to_string(mc.seed), num(r.outage), num(r.ci95_halfwidth),
           num(r.standard_error()), num(r.mean_harvested), num(r.mean_snr_db), num(r.throughput)});
  doc.flush(common.out_path, out);
  return kExitOk;
}

int cmd_optimum(const CommonOptions& common, bool over_rate, std::ostream& out) {
  const auto s = common.resolve();
  const SystemParams p = scenario::to_system_params(s);
  const auto fixed = over_rate ? analysis::optimal_rate_asymptotic(p) : analysis::optimal_tau_asymptotic(p);
  const auto search = over_rate ? analysis::search_rate_asymptotic(p) : analysis::search_tau_asymptotic(p);
  CsvDoc doc;
  const std::string name = over_rate ? "r" : "tau";
  doc.preamble(over_rate ? "opt-rate" : "opt-tau", &s,
               {{over_rate ? "alpha" : "beta",
                 num(over_rate ? analysis::rate_alpha(p) : analysis::tau_beta(p))}});
  doc.row({name + "_star", "throughput_star", name + "_search", "throughput_search"});
  doc.row({num(fixed.argument), num(fixed.throughput), num(search.argument), num(search.throughput)});
  doc.flush(common.out_path, out);
  return kExitOk;
}

struct CurveOptions {
  std::string start = "0 uW";
  std::string stop = "100 uW";
  int points = 101;
  std::string scale = "linear";
};

int cmd_eh_curve(const CommonOptions& common, const CurveOptions& o, std::ostream& out) {
  const auto s = common.resolve();
  const double start = scenario::parse_power(o.start);
  const double stop = scenario::parse_power(o.stop);
  if (o.scale != "linear" && o.scale != "log") throw ConfigError("--scale must be linear or log");
  const auto grid = make_grid(start, stop, o.points, o.scale == "log");

  const double eta = s.eh_eta.value_or(eh::max_slope(s.sigmoid));
  std::vector<std::pair<std::string, eh::EhModel>> models = {
      {"sigmoid", s.sigmoid},
      {"linear", eh::Linear{eta}},
      {"piecewise", eh::PiecewiseLinear{eta, s.sigmoid.max_power}}};
  if (!s.eh_table.empty()) {
    scenario::Scenario t = s;
    t.eh_kind = scenario::EhKind::tabulated;
    models.emplace_back("tabulated", scenario::build_eh_model(t));
  }

  CsvDoc doc;
  doc.preamble("eh-curve", &s,
               {{"start", num(start) + " W"}, {"stop", num(stop) + " W"},
                {"points", std::to_string(o.points)}, {"scale", o.scale}});
  std::vector<std::string> header = {"p_in_uw"};
  for (const auto& [name, model] : models) header.push_back("p_out_uw_" + name);
  doc.row(header);
  for (double p_in : grid) {
    std::vector<std::string> cells = {num(p_in * 1e6)};
    for (const auto& [name, model] : models) cells.push_back(num(eh::harvested_power(model, p_in) * 1e6));
    doc.row(cells);
  }
  doc.flush(common.out_path, out);
  return kExitOk;
}

int cmd_fit(const std::string& data_path, const std::string& out_path, std::ostream& out,
            std::ostream& err) {
  const auto data = eh::load_samples_uw(data_path);
  eh::FitReport report;
  try {
    report = eh::fit_sigmoid(data);
  } catch (const DomainError& e) {
    throw ConfigError(data_path + ": " + e.what());
  }
  CsvDoc doc;
  doc.preamble("fit", nullptr, {{"data", data_path}, {"points", std::to_string(data.size())}});
  doc.row({"m_uw", "a_per_w", "b_uw", "rmse_uw", "iterations", "converged"});
  doc.row({num(report.params.max_power * 1e6), num(report.params.a), num(report.params.b * 1e6),
           num(report.rmse * 1e6), std::to_string(report.iterations), report.converged ? "true" : "false"});
  doc.flush(out_path, out);
  if (!report.converged) {
    err << "fit: iteration budget exhausted before the simplex converged\n";
    return kExitNumerical;
  }
  return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Outage and throughput of wireless-powered links with non-linear energy harvesting",
               "wpc"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonOptions common;
  McOptions mc;
  std::string eval_methods = "quadrature,series,asymptotic,upper_bound";
  SweepOptions sweep;
  CurveOptions curve;
  std::string fit_data, fit_out;

  auto* eval = app.add_subcommand("eval", "all requested methods at one operating point");
  common.attach(eval);
  mc.attach(eval);
  eval->add_option("--methods", eval_methods, "comma list of quadrature,series,asymptotic,montecarlo,upper_bound");

  auto* sw = app.add_subcommand("sweep", "one parameter swept, one CSV column per method");
  CommonOptions sweep_common;
  McOptions sweep_mc;
  sweep_common.attach(sw);
  sweep_mc.attach(sw);
  sw->add_option("--axis", sweep.axis, "pt_dbm, rate, tau, n1, n2, m1 or m2")
      ->required()
      ->check(CLI::IsMember({"pt_dbm", "rate", "tau", "n1", "n2", "m1", "m2"}));
  sw->add_option("--start", sweep.start)->required();
  sw->add_option("--stop", sweep.stop)->required();
  sw->add_option("--points", sweep.points)->required();
  sw->add_option("--scale", sweep.scale, "linear or log");
  sw->add_option("--methods", sweep.methods, "comma list of methods");
  sw->add_option("--metric", sweep.metric, "outage or throughput (default by axis)");

  auto* mcs = app.add_subcommand("mc", "Monte Carlo estimate at one operating point");
  CommonOptions mc_common;
  McOptions mc_mc;
  mc_common.attach(mcs);
  mc_mc.attach(mcs);

  auto* opt_rate = app.add_subcommand("opt-rate", "throughput-optimal rate at high transmit power");
  CommonOptions rate_common;
  rate_common.attach(opt_rate);

  auto* opt_tau = app.add_subcommand("opt-tau", "throughput-optimal harvesting fraction at high transmit power");
  CommonOptions tau_common;
  tau_common.attach(opt_tau);

  auto* curve_cmd = app.add_subcommand("eh-curve", "harvested power of every model over an input grid");
  CommonOptions curve_common;
  curve_common.attach(curve_cmd);
  curve_cmd->add_option("--start", curve.start, "first input power, with unit");
  curve_cmd->add_option("--stop", curve.stop, "last input power, with unit");
  curve_cmd->add_option("--points", curve.points);
  curve_cmd->add_option("--scale", curve.scale, "linear or log");

  auto* fit = app.add_subcommand("fit", "least-squares sigmoid fit to measured data (microwatt columns)");
  fit->add_option("--data", fit_data, "two-column p_in_uW, p_out_uW file")->required();
  fit->add_option("--out", fit_out, "output CSV path (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "wpc: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (eval->parsed()) return cmd_eval(common, mc, eval_methods, out);
    if (sw->parsed()) return cmd_sweep(sweep_common, sweep_mc, sweep, out, err);
    if (mcs->parsed()) return cmd_mc(mc_common, mc_mc, out);
    if (opt_rate->parsed()) return cmd_optimum(rate_common, true, out);
    if (opt_tau->parsed()) return cmd_optimum(tau_common, false, out);
    if (curve_cmd->parsed()) return cmd_eh_curve(curve_common, curve, out);
    if (fit->parsed()) return cmd_fit(fit_data, fit_out, out, err);
  } catch (const ConfigError& e) {
    err << "wpc: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "wpc: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ModelMismatchError& e) {
    err << "wpc: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "wpc: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}

} // namespace wpc::cli
