#include "wpc/scenario.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>

#include "wpc/channel.hpp"
#include "wpc/error.hpp"

namespace wpc::scenario {

double mean_gain(const LinkBudget& lb, Direction which) {
  const double friis = kSpeedOfLight / (4.0 * std::numbers::pi * lb.freq_hz);
  const bool down = which == Direction::downlink;
  const double gains = down ? db_to_linear(lb.gain_ps_dbi + lb.gain_wd_dbi)
                            : db_to_linear(lb.gain_wd_dbi + lb.gain_irs_dbi);
  const double d = down ? lb.d1_m : lb.d2_m;
  return gains * friis * friis * std::pow(d, -lb.exponent);
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

Table1 table1_defaults() {
  Table1 t;
  t.link = LinkBudget{};
  t.eh = {9.079e-6, 47083.0, 2.9e-6};
  t.theta = 0.5;
  t.sigma2 = dbm_to_watts(-96.0);
  return t;
}

Scenario default_scenario() {
  const Table1 t = table1_defaults();
  Scenario s;
  s.link = t.link;
  s.sigmoid = t.eh;
  s.theta = t.theta;
  s.sigma2_w = t.sigma2;
  s.pt_w = dbm_to_watts(27.0);
  return s;
}

namespace {

constexpr std::array<std::string_view, 24> kKeys = {
    "pt",      "tau",     "rate",         "sigma2",      "theta",  "m1",
    "m2",      "n1",      "n2",           "freq",        "d1",     "d2",
    "exponent", "gain_ps", "gain_irs",    "gain_wd",     "mu1",    "mu2",
    "eh_model", "eh_m",   "eh_a",         "eh_b",        "eh_eta", "eh_table"};

std::string_view trim(std::string_view v) {
  while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
  while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
  return v;
}

struct Quantity {
  double number;
  std::string unit;
};

Quantity split_quantity(std::string_view key, std::string_view text) {
  text = trim(text);
  // from_chars has no leading '+'.
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double number = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), number);
  if (ec != std::errc() || !std::isfinite(number))
    throw ConfigError("bad numeric value for '" + std::string(key) + "': '" + std::string(text) + "'");
  std::string unit(trim(std::string_view(ptr, text.data() + text.size() - ptr)));
  return {number, unit};
}

[[noreturn]] void bad_unit(std::string_view key, const std::string& unit, std::string_view expected) {
  throw ConfigError("key '" + std::string(key) + "': unit '" + unit + "' not accepted (expected " +
                    std::string(expected) + ")");
}

double parse_power_keyed(std::string_view key, std::string_view text) {
  const Quantity q = split_quantity(key, text);
  if (q.unit == "W") return q.number;
  if (q.unit == "mW") return q.number * 1e-3;
  if (q.unit == "uW" || q.unit == "\xC2\xB5W") return q.number * 1e-6;
  if (q.unit == "nW") return q.number * 1e-9;
  if (q.unit == "pW") return q.number * 1e-12;
  if (q.unit == "dBm") return dbm_to_watts(q.number);
  if (q.unit == "dBW") return dbm_to_watts(q.number + 30.0);
  bad_unit(key, q.unit, "W, mW, uW, nW, pW, dBm or dBW");
}

double parse_antenna_gain(std::string_view key, std::string_view text) {
  const Quantity q = split_quantity(key, text);
  if (q.unit == "dBi" || q.unit == "dB") return q.number;
  bad_unit(key, q.unit, "dBi");
}

double parse_frequency(std::string_view key, std::string_view text) {
  const Quantity q = split_quantity(key, text);
  if (q.unit == "Hz") return q.number;
  if (q.unit == "kHz") return q.number * 1e3;
  if (q.unit == "MHz") return q.number * 1e6;
  if (q.unit == "GHz") return q.number * 1e9;
  bad_unit(key, q.unit, "Hz, kHz, MHz or GHz");
}

double parse_distance(std::string_view key, std::string_view text) {
  const Quantity q = split_quantity(key, text);
  if (q.unit == "m") return q.number;
  if (q.unit == "km") return q.number * 1e3;
  bad_unit(key, q.unit, "m or km");
}

double parse_plain(std::string_view key, std::string_view text) {
  const Quantity q = split_quantity(key, text);
  if (!q.unit.empty()) bad_unit(key, q.unit, "a dimensionless number");
  return q.number;
}

double parse_linear_gain(std::string_view key, std::string_view text) {
  const Quantity q = split_quantity(key, text);
  if (q.unit.empty()) return q.number;
  if (q.unit == "dB") return db_to_linear(q.number);
  bad_unit(key, q.unit, "a linear gain or dB");
}

double parse_inverse_power(std::string_view key, std::string_view text) {
  const Quantity q = split_quantity(key, text);
  if (q.unit.empty() || q.unit == "/W") return q.number;
  if (q.unit == "/mW") return q.number * 1e3;
  if (q.unit == "/uW") return q.number * 1e6;
  bad_unit(key, q.unit, "a number per watt (optionally '/W', '/mW', '/uW')");
}

int parse_count(std::string_view key, std::string_view text) {
  const double v = parse_plain(key, text);
  if (v != std::floor(v) || v < 1 || v > 1000)
    throw ConfigError("key '" + std::string(key) + "' needs an integer >= 1, got '" +
                      std::string(trim(text)) + "'");
  return static_cast<int>(v);
}

double positive(std::string_view key, double v) {
  if (!(v > 0.0)) throw ConfigError("key '" + std::string(key) + "' must be positive");
  return v;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string_view kind_name(EhKind k) {
  switch (k) {
    case EhKind::sigmoid: return "sigmoid";
    case EhKind::linear: return "linear";
    case EhKind::piecewise: return "piecewise";
    case EhKind::tabulated: return "tabulated";
  }
  return "sigmoid";
}

} // namespace

double parse_power(std::string_view text) { return parse_power_keyed("power", text); }

std::span<const std::string_view> setting_keys() { return kKeys; }

void apply_setting(Scenario& s, std::string_view key, std::string_view value) {
  key = trim(key);
  if (key == "pt") s.pt_w = positive(key, parse_power_keyed(key, value));
  else if (key == "tau") {
    s.tau = parse_plain(key, value);
    if (!(s.tau > 0.0 && s.tau < 1.0)) throw ConfigError("tau must lie strictly between 0 and 1");
  } else if (key == "rate") s.rate = positive(key, parse_plain(key, value));
  else if (key == "sigma2") s.sigma2_w = positive(key, parse_power_keyed(key, value));
  else if (key == "theta") {
    s.theta = parse_plain(key, value);
    if (!(s.theta > 0.0 && s.theta <= 1.0)) throw ConfigError("theta must lie in (0, 1]");
  } else if (key == "m1") s.m1 = parse_count(key, value);
  else if (key == "m2") s.m2 = parse_count(key, value);
  else if (key == "n1") s.n1 = parse_count(key, value);
  else if (key == "n2") s.n2 = parse_count(key, value);
  else if (key == "freq") s.link.freq_hz = positive(key, parse_frequency(key, value));
  else if (key == "d1") s.link.d1_m = positive(key, parse_distance(key, value));
  else if (key == "d2") s.link.d2_m = positive(key, parse_distance(key, value));
  else if (key == "exponent") s.link.exponent = positive(key, parse_plain(key, value));
  else if (key == "gain_ps") s.link.gain_ps_dbi = parse_antenna_gain(key, value);
  else if (key == "gain_irs") s.link.gain_irs_dbi = parse_antenna_gain(key, value);
  else if (key == "gain_wd") s.link.gain_wd_dbi = parse_antenna_gain(key, value);
  else if (key == "mu1") s.mu1 = positive(key, parse_linear_gain(key, value));
  else if (key == "mu2") s.mu2 = positive(key, parse_linear_gain(key, value));
  else if (key == "eh_model") {
    const std::string_view v = trim(value);
    if (v == "sigmoid") s.eh_kind = EhKind::sigmoid;
    else if (v == "linear") s.eh_kind = EhKind::linear;
    else if (v == "piecewise") s.eh_kind = EhKind::piecewise;
    else if (v == "tabulated") s.eh_kind = EhKind::tabulated;
    else throw ConfigError("eh_model must be sigmoid, linear, piecewise or tabulated");
  } else if (key == "eh_m") s.sigmoid.max_power = positive(key, parse_power_keyed(key, value));
  else if (key == "eh_a") s.sigmoid.a = positive(key, parse_inverse_power(key, value));
  else if (key == "eh_b") s.sigmoid.b = positive(key, parse_power_keyed(key, value));
  else if (key == "eh_eta") {
    const double eta = parse_plain(key, value);
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("eh_eta must lie in (0, 1]");
    s.eh_eta = eta;
  } else if (key == "eh_table") {
    s.eh_table = std::string(trim(value));
    if (s.eh_table.empty()) throw ConfigError("eh_table needs a file path");
  } else {
    throw ConfigError("unknown scenario key '" + std::string(key) + "'");
  }
}

void parse_scenario(std::istream& in, Scenario& s, std::string_view source) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v = trim(line);
    if (v.empty() || v.front() == '#') continue;
    const auto eq = v.find('=');
    const std::string where = std::string(source) + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    try {
      apply_setting(s, v.substr(0, eq), v.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

Scenario load_scenario(const std::filesystem::path& path, Scenario base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path.string());
  parse_scenario(in, base, path.string());
  return base;
}

std::vector<std::pair<std::string, std::string>> describe(const Scenario& s) {
  std::vector<std::pair<std::string, std::string>> out = {
      {"pt", fmt(s.pt_w) + " W"},
      {"tau", fmt(s.tau)},
      {"rate", fmt(s.rate)},
      {"sigma2", fmt(s.sigma2_w) + " W"},
      {"theta", fmt(s.theta)},
      {"m1", std::to_string(s.m1)},
      {"m2", std::to_string(s.m2)},
      {"n1", std::to_string(s.n1)},
      {"n2", std::to_string(s.n2)},
      {"freq", fmt(s.link.freq_hz) + " Hz"},
      {"d1", fmt(s.link.d1_m) + " m"},
      {"d2", fmt(s.link.d2_m) + " m"},
      {"exponent", fmt(s.link.exponent)},
      {"gain_ps", fmt(s.link.gain_ps_dbi) + " dBi"},
      {"gain_irs", fmt(s.link.gain_irs_dbi) + " dBi"},
      {"gain_wd", fmt(s.link.gain_wd_dbi) + " dBi"},
      {"mu1", fmt(s.mu1.value_or(mean_gain(s.link, Direction::downlink)))},
      {"mu2", fmt(s.mu2.value_or(mean_gain(s.link, Direction::uplink)))},
      {"eh_model", std::string(kind_name(s.eh_kind))},
      {"eh_m", fmt(s.sigmoid.max_power) + " W"},
      {"eh_a", fmt(s.sigmoid.a)},
      {"eh_b", fmt(s.sigmoid.b) + " W"},
      {"eh_eta", fmt(s.eh_eta.value_or(eh::max_slope(s.sigmoid)))},
  };
  if (!s.eh_table.empty()) out.emplace_back("eh_table", s.eh_table);
  return out;
}

eh::EhModel build_eh_model(const Scenario& s) {
  const double eta = s.eh_eta.value_or(eh::max_slope(s.sigmoid));
  switch (s.eh_kind) {
    case EhKind::sigmoid: return s.sigmoid;
    case EhKind::linear: return eh::Linear{eta};
    case EhKind::piecewise: return eh::PiecewiseLinear{eta, s.sigmoid.max_power};
    case EhKind::tabulated:
      if (s.eh_table.empty()) throw ConfigError("eh_model = tabulated needs eh_table");
      try {
        return eh::Tabulated(eh::load_samples_uw(s.eh_table));
      } catch (const DomainError& e) {
        throw ConfigError(s.eh_table + ": " + e.what());
      }
  }
  return s.sigmoid;
}

analysis::SystemParams to_system_params(const Scenario& s) {
  analysis::SystemParams p;
  p.p_t = s.pt_w;
  p.tau = s.tau;
  p.rate = s.rate;
  p.sigma2 = s.sigma2_w;
  p.theta = s.theta;
  p.dl = channel::effective({s.m1, s.n1, s.mu1.value_or(mean_gain(s.link, Direction::downlink))});
  p.ul = channel::effective({s.m2, s.n2, s.mu2.value_or(mean_gain(s.link, Direction::uplink))});
  p.eh = build_eh_model(s);
  return p;
}

} // namespace wpc::scenario
