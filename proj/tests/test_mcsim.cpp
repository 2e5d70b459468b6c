#include <doctest.h>

#include <cmath>

#include "wpc/analysis.hpp"
#include "wpc/error.hpp"
#include "wpc/mcsim.hpp"
#include "wpc/random.hpp"

using namespace wpc;
using doctest::Approx;

namespace {

analysis::SystemParams reference(double pt) {
  analysis::SystemParams p;
  p.p_t = pt;
  p.tau = 0.5;
  p.rate = 5.0;
  p.sigma2 = 2.511886431509582e-13;
  p.theta = 0.5;
  p.dl = {2, 2 / 3.9121387719064733e-4};
  p.ul = {2, 2 / 3.007337899560304e-5};
  p.eh = eh::NonLinearSigmoid{9.079e-6, 47083.0, 2.9e-6};
  return p;
}

} // namespace

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(rng::philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(rng::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(rng::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("counter stream stays in (0, 1] and is reproducible") {
  rng::CounterStream a(5, 17), b(5, 17), c(5, 18);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform_open();
    CHECK(x > 0.0);
    CHECK(x <= 1.0);
    CHECK(x == b.uniform_open());
    differs |= x != c.uniform_open();
  }
  CHECK(differs);
}

TEST_CASE("simulation agrees with quadrature") {
  const auto p = reference(0.1);
  const auto q = analysis::outage_quadrature(p).value;
  const auto r = mcsim::simulate(p, {400000, 3, 4096}, 2);
  CHECK(std::abs(r.outage - q) < 4.0 * r.standard_error());
  CHECK(r.n_samples == 400000);
  CHECK(r.outages == static_cast<std::int64_t>(std::llround(r.outage * 400000)));
  CHECK(r.throughput == Approx(5.0 * 0.5 * (1 - r.outage)));
  CHECK(r.ci95_halfwidth == Approx(1.96 * std::sqrt(r.outage * (1 - r.outage) / 400000)));
  CHECK(r.mean_harvested > 0.0);
  CHECK(r.mean_harvested < 9.079e-6);
  CHECK(!r.ci_warning);
}

TEST_CASE("results do not depend on the worker count") {
  const auto p = reference(0.02);
  const auto one = mcsim::simulate(p, {50000, 9, 1000}, 1);
  for (unsigned w : {2u, 3u, 8u}) {
    const auto many = mcsim::simulate(p, {50000, 9, 1000}, w);
    CHECK(many.outages == one.outages);
    CHECK(many.mean_harvested == one.mean_harvested);
    CHECK(many.mean_snr_db == one.mean_snr_db);
  }
  const auto other_seed = mcsim::simulate(p, {50000, 10, 1000}, 1);
  CHECK(other_seed.mean_harvested != one.mean_harvested);
}

TEST_CASE("non-sigmoid models run through the simulator") {
  auto p = reference(0.5);
  p.eh = eh::PiecewiseLinear{0.2, 9.079e-6};
  const auto r = mcsim::simulate(p, {20000, 1, 4096}, 1);
  CHECK(r.outage >= 0.0);
  CHECK(r.outage <= 1.0);
  p.eh = eh::Linear{0.2};
  CHECK(mcsim::simulate(p, {20000, 1, 4096}, 1).outage <= r.outage);
}

TEST_CASE("small runs flag the confidence interval") {
  CHECK(mcsim::simulate(reference(0.5), {500, 1, 100}, 1).ci_warning);
  CHECK(mcsim::simulate(reference(1e-9), {5000, 1, 1000}, 1).ci_warning);
  CHECK_THROWS_AS(mcsim::simulate(reference(0.5), {0, 1, 100}, 1), DomainError);
  CHECK_THROWS_AS(mcsim::simulate(reference(0.5), {10, 1, 0}, 1), DomainError);
}

TEST_CASE("95% intervals cover the analytic outage") {
  const auto p = reference(0.03);
  const double p0 = analysis::outage_quadrature(p).value;
  int covered = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto r = mcsim::simulate(p, {10000, seed, 10000}, 1);
    covered += std::abs(r.outage - p0) <= r.ci95_halfwidth;
  }
  CHECK(covered >= 180);
}
