#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wpc/analysis.hpp"
#include "wpc/ehmodel.hpp"

namespace wpc::scenario {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

/// Large-scale geometry of the PS -> WD -> IRS link.
struct LinkBudget {
  double freq_hz = 868e6;
  double d1_m = 4.0;       ///< PS to WD
  double d2_m = 10.0;      ///< WD to IRS
  double exponent = 2.8;   ///< path-loss exponent, both hops
  double gain_ps_dbi = 11.0;
  double gain_irs_dbi = 11.0;
  double gain_wd_dbi = 3.0;
};

enum class Direction { downlink, uplink };

/// Free-space constant at 1 m with the exponent applied to the distance:
/// G_tx G_rx (c0 / (4 pi f))^2 d^{-exponent}.
double mean_gain(const LinkBudget& lb, Direction which);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);

struct Table1 {
  LinkBudget link;
  eh::NonLinearSigmoid eh;
  double theta = 0.0;
  double sigma2 = 0.0;  ///< [W]
};

/// The reference measurement scenario: 868 MHz, 4 m / 10 m hops, exponent
/// 2.8, 11/11/3 dBi antennas, -96 dBm noise, theta 0.5, and the fitted
/// sigmoid a = 47083 /W, b = 2.9 uW, M = 9.079 uW.
Table1 table1_defaults();

enum class EhKind { sigmoid, linear, piecewise, tabulated };

/// Everything the CLI needs to build SystemParams, in core units.
struct Scenario {
  LinkBudget link;
  eh::NonLinearSigmoid sigmoid;
  EhKind eh_kind = EhKind::sigmoid;
  std::optional<double> eh_eta;  ///< defaults to the sigmoid's maximum slope
  std::string eh_table;          ///< path of the tabulated model, microwatt columns
  double pt_w = 0.0;
  double tau = 0.5;
  double rate = 5.0;
  double sigma2_w = 0.0;
  double theta = 0.5;
  int m1 = 2;
  int m2 = 2;
  int n1 = 1;
  int n2 = 1;
  std::optional<double> mu1;  ///< overrides the link-budget downlink gain
  std::optional<double> mu2;  ///< overrides the link-budget uplink gain
};

/// table1_defaults() with p_t = 27 dBm, m1 = m2 = 2, N1 = N2 = 1,
/// tau = 0.5 and R = 5 bits/s/Hz.
Scenario default_scenario();

/// Every key accepted by scenario files and by apply_setting().
std::span<const std::string_view> setting_keys();

/// Sets one key from its textual value, e.g. ("pt", "27 dBm"). Dimensional
/// keys require a unit suffix. Throws ConfigError on unknown keys or bad values.
void apply_setting(Scenario& s, std::string_view key, std::string_view value);

/// Reads `key = value` lines ('#' comments, blank lines allowed) on top of `s`.
/// Parses a power with unit ("27 dBm", "5 uW", ...) into watts.
double parse_power(std::string_view text);

void parse_scenario(std::istream& in, Scenario& s, std::string_view source = "<input>");
Scenario load_scenario(const std::filesystem::path& path, Scenario base = default_scenario());

/// Resolved configuration as (key, canonical value) pairs.
std::vector<std::pair<std::string, std::string>> describe(const Scenario& s);

eh::EhModel build_eh_model(const Scenario& s);
analysis::SystemParams to_system_params(const Scenario& s);

} // namespace wpc::scenario
