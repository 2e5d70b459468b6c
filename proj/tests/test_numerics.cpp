#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wpc/error.hpp"
#include "wpc/numerics.hpp"

using namespace wpc::numerics;
using doctest::Approx;

TEST_CASE("adaptive quadrature on smooth and singular integrands") {
  const auto smooth = integrate([](double x) { return std::exp(-x * x); }, 0.0, 3.0, 1e-12, 1e-14);
  CHECK(smooth.value == Approx(0.5 * std::sqrt(std::numbers::pi) * std::erf(3.0)).epsilon(1e-12));
  CHECK(smooth.abs_err < 1e-11);

  const auto log_sing = integrate_01([](double x) { return x > 0.0 ? -std::log(x) : 0.0; }, 1e-10, 1e-12);
  CHECK(log_sing.value == Approx(1.0).epsilon(1e-9));

  const auto inv_sqrt = integrate_01([](double x) { return x > 0.0 ? 1.0 / std::sqrt(x) : 0.0; }, 1e-8, 1e-10);
  CHECK(inv_sqrt.value == Approx(2.0).epsilon(1e-7));
}

TEST_CASE("quadrature reports failure instead of a wrong value") {
  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-10, 1e-10, 50),
                  wpc::ConvergenceError);
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 1.0, 1.0, 1e-10, 1e-10), wpc::DomainError);
  try {
    integrate([](double x) { return std::sin(1.0 / (x + 1e-4)); }, 0.0, 1.0, 1e-14, 1e-15, 20);
    FAIL("expected ConvergenceError");
  } catch (const wpc::ConvergenceError& e) {
    CHECK(std::isfinite(e.best_estimate()));
    CHECK(e.abs_err() > 0.0);
  }
}

TEST_CASE("Richardson derivatives of exp and sin") {
  for (int n = 1; n <= 5; ++n) {
    const auto r = richardson([](double x) { return std::exp(x); }, {n, 0.5, 0.4 / n, 6});
    CHECK(r.value == Approx(std::exp(0.5)).epsilon(1e-6));
    // the reported error bounds the true one
    CHECK(std::abs(r.value - std::exp(0.5)) <= 2.0 * r.abs_err + 1e-12);
  }
  const auto third = richardson([](double x) { return std::sin(x); }, {3, 1.0, 0.1, 6});
  CHECK(third.value == Approx(-std::cos(1.0)).epsilon(1e-8));
  CHECK(third.abs_err < 1e-6);

  const auto zero = richardson([](double x) { return x * x; }, {0, 3.0, 0.0, 6});
  CHECK(zero.value == 9.0);
  CHECK(richardson_derivative([](double x) { return x * x * x; }, {2, 2.0, 0.1, 6}) == Approx(12.0));
  CHECK_THROWS_AS(richardson([](double x) { return x; }, {kMaxDiffOrder + 1, 0.0, 0.1, 6}),
                  wpc::DomainError);
}

TEST_CASE("bracketed root finding") {
  const double r = find_root_bracketed([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-14);
  CHECK(r == Approx(std::sqrt(2.0)).epsilon(1e-14));
  const double w = find_root_bracketed([](double x) { return x * std::exp(x) - 1.0; }, 0.0, 1.0);
  CHECK(w == Approx(0.5671432904097838).epsilon(1e-10));
  CHECK_THROWS_AS(find_root_bracketed([](double x) { return x * x + 1.0; }, -1.0, 1.0),
                  wpc::BracketError);
}

TEST_CASE("golden-section maximisation") {
  const auto m = maximize_quasiconcave([](double x) { return -(x - 1.3) * (x - 1.3); }, 0.0, 5.0, 1e-9);
  CHECK(m.x == Approx(1.3).epsilon(1e-8));
  CHECK(m.value <= 0.0);
  const auto peak = maximize_quasiconcave([](double x) { return x * std::exp(-x); }, 0.0, 10.0, 1e-9);
  CHECK(peak.x == Approx(1.0).epsilon(1e-7));
}
