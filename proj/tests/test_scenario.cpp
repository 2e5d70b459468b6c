#include <doctest.h>

#include <cmath>
#include <sstream>

#include "wpc/error.hpp"
#include "wpc/scenario.hpp"

using namespace wpc;
using namespace wpc::scenario;
using doctest::Approx;

TEST_CASE("link budget gains") {
  const LinkBudget lb;
  // 10^{1.4} (c / (4 pi f))^2 d^{-2.8}, evaluated offline
  CHECK(mean_gain(lb, Direction::downlink) == Approx(3.9121387719064733e-4).epsilon(1e-12));
  CHECK(mean_gain(lb, Direction::uplink) == Approx(3.007337899560304e-5).epsilon(1e-12));
  LinkBudget near = lb;
  near.d1_m = 1.0;
  near.gain_ps_dbi = 0.0;
  near.gain_wd_dbi = 0.0;
  CHECK(mean_gain(near, Direction::downlink) == Approx(7.554091264870048e-4).epsilon(1e-12));
}

TEST_CASE("unit helpers") {
  CHECK(dbm_to_watts(30.0) == Approx(1.0));
  CHECK(dbm_to_watts(-96.0) == Approx(2.511886431509582e-13));
  CHECK(watts_to_dbm(0.5) == Approx(26.98970004336019));
  CHECK(db_to_linear(3.0) == Approx(1.9952623149688795));
  CHECK(parse_power("5 uW") == Approx(5e-6));
  CHECK(parse_power("0 W") == 0.0);
  CHECK_THROWS_AS(parse_power("5"), ConfigError);
}

TEST_CASE("defaults reproduce the reference scenario") {
  const Table1 t = table1_defaults();
  CHECK(t.eh.max_power == 9.079e-6);
  CHECK(t.eh.a == 47083.0);
  CHECK(t.eh.b == 2.9e-6);
  CHECK(t.theta == 0.5);
  CHECK(t.sigma2 == Approx(dbm_to_watts(-96.0)));

  const Scenario s = default_scenario();
  CHECK(s.pt_w == Approx(dbm_to_watts(27.0)));
  const auto p = to_system_params(s);
  CHECK(p.dl.shape == 2);
  CHECK(p.ul.rate == Approx(2.0 / 3.007337899560304e-5));
  CHECK(std::holds_alternative<eh::NonLinearSigmoid>(p.eh));
}

TEST_CASE("settings with units") {
  Scenario s = default_scenario();
  apply_setting(s, "pt", "30 dBm");
  CHECK(s.pt_w == Approx(1.0));
  apply_setting(s, "pt", "250 mW");
  CHECK(s.pt_w == Approx(0.25));
  apply_setting(s, "sigma2", "-126 dBW");
  CHECK(s.sigma2_w == Approx(dbm_to_watts(-96.0)));
  apply_setting(s, "freq", "2.4 GHz");
  CHECK(s.link.freq_hz == Approx(2.4e9));
  apply_setting(s, "d1", "0.5 km");
  CHECK(s.link.d1_m == Approx(500.0));
  apply_setting(s, "eh_a", "0.047083 /uW");
  CHECK(s.sigmoid.a == Approx(47083.0));
  apply_setting(s, "eh_b", "2.9 µW");
  CHECK(s.sigmoid.b == Approx(2.9e-6));
  apply_setting(s, "mu1", "-30 dB");
  CHECK(*s.mu1 == Approx(1e-3));
  apply_setting(s, "mu2", "2e-5");
  CHECK(*s.mu2 == Approx(2e-5));
  apply_setting(s, "n2", "3");
  CHECK(s.n2 == 3);
  apply_setting(s, "eh_model", "piecewise");
  CHECK(std::holds_alternative<eh::PiecewiseLinear>(to_system_params(s).eh));

  CHECK_THROWS_AS(apply_setting(s, "pt", "1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(s, "pt", "1 furlong"), ConfigError);
  CHECK_THROWS_AS(apply_setting(s, "pt", "-1 W"), ConfigError);
  CHECK_THROWS_AS(apply_setting(s, "tau", "1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(s, "n1", "2.5"), ConfigError);
  CHECK_THROWS_AS(apply_setting(s, "m1", "0"), ConfigError);
  CHECK_THROWS_AS(apply_setting(s, "gain_ps", "11"), ConfigError);
  CHECK_THROWS_AS(apply_setting(s, "colour", "blue"), ConfigError);
  CHECK_THROWS_AS(apply_setting(s, "eh_model", "magic"), ConfigError);
}

TEST_CASE("scenario text parsing") {
  Scenario s = default_scenario();
  std::istringstream in("# comment\n\npt = 10 dBm\n  m1=3\nn2 = 2 # not allowed inline\n");
  try {
    parse_scenario(in, s, "case.scn");
    FAIL("inline comment should be rejected");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("case.scn:5") != std::string::npos);
  }
  CHECK(s.m1 == 3);
  CHECK(s.pt_w == Approx(0.01));

  std::istringstream missing("pt 10 dBm\n");
  CHECK_THROWS_AS(parse_scenario(missing, s), ConfigError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/x.scn"), ConfigError);
}

TEST_CASE("describe round-trips through the parser") {
  Scenario s = default_scenario();
  apply_setting(s, "pt", "13 dBm");
  apply_setting(s, "n1", "3");
  apply_setting(s, "exponent", "2.2");
  std::ostringstream text;
  for (const auto& [k, v] : describe(s)) text << k << " = " << v << '\n';
  Scenario back = default_scenario();
  std::istringstream in(text.str());
  parse_scenario(in, back);
  CHECK(back.pt_w == Approx(s.pt_w).epsilon(1e-8));
  CHECK(back.n1 == 3);
  CHECK(back.link.exponent == 2.2);
  const auto p = to_system_params(s), q = to_system_params(back);
  CHECK(q.dl.rate == Approx(p.dl.rate).epsilon(1e-8));
  CHECK(q.ul.rate == Approx(p.ul.rate).epsilon(1e-8));
}

TEST_CASE("tabulated model needs a table") {
  Scenario s = default_scenario();
  apply_setting(s, "eh_model", "tabulated");
  CHECK_THROWS_AS(to_system_params(s), ConfigError);
  apply_setting(s, "eh_table", WPC_SOURCE_DIR "/data/eh_circuit_illustrative.csv");
  CHECK(std::holds_alternative<eh::Tabulated>(to_system_params(s).eh));
}
