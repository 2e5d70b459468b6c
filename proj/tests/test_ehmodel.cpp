#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "wpc/ehmodel.hpp"
#include "wpc/error.hpp"

using namespace wpc::eh;
using doctest::Approx;

namespace {
const NonLinearSigmoid kTable1{9.079e-6, 47083.0, 2.9e-6};

std::filesystem::path temp_file(const char* name, const char* text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}
} // namespace

TEST_CASE("sigmoid shape") {
  CHECK(harvested_power(kTable1, 0.0) == 0.0);
  CHECK(harvested_power(kTable1, 1.0) == Approx(kTable1.max_power).epsilon(1e-12));
  // direct evaluation of M (1 - e^{-aP}) / (1 + e^{-a(P-b)}) at P = b
  const double ab = kTable1.a * kTable1.b;
  CHECK(harvested_power(kTable1, kTable1.b) ==
        Approx(kTable1.max_power * (1 - std::exp(-ab)) / 2.0).epsilon(1e-13));
  double prev = 0.0;
  for (int i = 1; i <= 200; ++i) {
    const double v = harvested_power(kTable1, i * 1e-6);
    CHECK(v >= prev);
    CHECK(v < kTable1.max_power);
    prev = v;
  }
  CHECK(max_slope(kTable1) == Approx(0.200093976).epsilon(1e-8));
  CHECK_THROWS_AS(validate(NonLinearSigmoid{0.0, 1.0, 1.0}), wpc::DomainError);
}

TEST_CASE("linear and piecewise models") {
  const EhModel lin = Linear{0.3};
  const EhModel pw = PiecewiseLinear{0.3, 2e-6};
  CHECK(harvested_power(lin, 1e-5) == Approx(3e-6));
  CHECK(harvested_power(pw, 1e-6) == Approx(3e-7));
  CHECK(harvested_power(pw, 1e-3) == Approx(2e-6));
  CHECK(model_name(lin) == "linear");
  CHECK(model_name(pw) == "piecewise");
  CHECK(model_name(EhModel{kTable1}) == "sigmoid");
}

TEST_CASE("tabulated model interpolates its knots") {
  std::vector<DataPoint> pts;
  for (int i = 1; i <= 8; ++i) pts.push_back({i * 5e-6, harvested_power(kTable1, i * 5e-6)});
  const Tabulated t(pts);
  for (const auto& p : pts) CHECK(t(p.p_in) == Approx(p.p_out).epsilon(1e-12));
  CHECK(t(0.0) == 0.0);
  CHECK(t(2.5e-6) == Approx(0.5 * pts.front().p_out));
  CHECK(t(1.0) == Approx(pts.back().p_out));
  CHECK(t(12e-6) == Approx(harvested_power(kTable1, 12e-6)).epsilon(0.02));
  CHECK(model_name(EhModel{t}) == "tabulated");

  CHECK_THROWS_AS(Tabulated({{1e-6, 1e-7}, {2e-6, 2e-7}}), wpc::DomainError);
  CHECK_THROWS_AS(Tabulated({{1e-6, 1e-7}, {3e-6, 2e-7}, {2e-6, 3e-7}, {4e-6, 4e-7}}), wpc::DomainError);
}

TEST_CASE("sigmoid fit recovers noiseless parameters") {
  std::vector<DataPoint> data;
  for (int i = 1; i <= 40; ++i) data.push_back({i * 2.5e-6, harvested_power(kTable1, i * 2.5e-6)});
  const FitReport r = fit_sigmoid(data);
  CHECK(r.converged);
  CHECK(r.params.max_power == Approx(kTable1.max_power).epsilon(1e-4));
  CHECK(r.params.a == Approx(kTable1.a).epsilon(1e-4));
  CHECK(r.params.b == Approx(kTable1.b).epsilon(1e-4));
  CHECK(r.rmse < 1e-10);
  CHECK_THROWS_AS(fit_sigmoid(std::span<const DataPoint>(data.data(), 3)), wpc::DomainError);
}

TEST_CASE("sample loader handles headers, comments and delimiters") {
  const auto path = temp_file("wpc_eh_samples.txt",
                              "# bench run\np_in,p_out\n1,0.2\n2;0.4\n3 0.6\n\n4\t0.8\n");
  const auto pts = load_samples_uw(path);
  REQUIRE(pts.size() == 4);
  CHECK(pts[0].p_in == Approx(1e-6));
  CHECK(pts[3].p_out == Approx(0.8e-6));
  std::filesystem::remove(path);

  const auto bad = temp_file("wpc_eh_bad.txt", "1,0.2\n2,x\n");
  CHECK_THROWS(load_samples_uw(bad));
  std::filesystem::remove(bad);
  CHECK_THROWS(load_samples_uw("/nonexistent/wpc/samples.csv"));
}

TEST_CASE("compact and offset forms of the sigmoid agree") {
  // The offset form cancels badly at small inputs, so it is evaluated in
  // extended precision.
  const long double m = kTable1.max_power, a = kTable1.a, b = kTable1.b;
  const long double omega = 1.0L / (1.0L + std::exp(a * b));
  double prev = 0.0;
  for (double p = 1e-9; p <= 10.0; p *= 1.2) {
    const long double logistic = m / (1.0L + std::exp(-a * (p - b)));
    const double offset = static_cast<double>((logistic - m * omega) / (1.0L - omega));
    const double v = harvested_power(kTable1, p);
    CHECK(std::abs(v - offset) <= 1e-12 * offset);
    // strictly increasing until the output rounds to M
    if (prev < kTable1.max_power) CHECK(v > prev);
    CHECK(v <= kTable1.max_power);
    prev = v;
  }
  CHECK(harvested_power(kTable1, kTable1.b) * 1e6 == Approx(0.5794).epsilon(1e-4));
  CHECK(harvested_power(EhModel{Linear{0.5}}, 4e-6) == Approx(2e-6));
  CHECK_THROWS_AS(harvested_power(kTable1, -1e-9), wpc::DomainError);
}

TEST_CASE("piecewise model switches at M / eta") {
  const PiecewiseLinear pw{0.25, 2e-6};
  const Linear lin{0.25};
  for (double p = 1e-7; p < 8e-6; p += 2.5e-7) CHECK(harvested_power(EhModel{pw}, p) == harvested_power(EhModel{lin}, p));
  for (double p = 8e-6; p < 1e-3; p *= 1.5) CHECK(harvested_power(EhModel{pw}, p) == 2e-6);
}

TEST_CASE("fit under one percent multiplicative noise") {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> noise(0.0, 0.01);
  int within = 0;
  for (int seed = 0; seed < 100; ++seed) {
    std::vector<DataPoint> data;
    for (int i = 0; i < 20; ++i) {
      const double p_in = i * 20e-6 / 19;
      data.push_back({p_in, std::max(0.0, harvested_power(kTable1, p_in) * (1.0 + noise(gen)))});
    }
    const FitReport r = fit_sigmoid(data);
    within += r.rmse <= 0.02 * kTable1.max_power;
  }
  CHECK(within == 100);
}
