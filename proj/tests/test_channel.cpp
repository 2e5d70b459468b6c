#include <doctest.h>

#include <cmath>

#include "wpc/channel.hpp"
#include "wpc/error.hpp"
#include "wpc/numerics.hpp"
#include "wpc/random.hpp"

using namespace wpc::channel;
using doctest::Approx;

TEST_CASE("effective channel combines antennas into one Gamma law") {
  const auto ch = effective({2, 3, 4e-4});
  CHECK(ch.shape == 6);
  CHECK(ch.rate == Approx(2.0 / 4e-4));
  CHECK(ch.mean() == Approx(3 * 4e-4));
  CHECK_THROWS_AS(effective({0, 1, 1.0}), wpc::DomainError);
  CHECK_THROWS_AS(effective({1, 1, -1.0}), wpc::DomainError);
  CHECK_THROWS_AS(validate({1, 0.0}), wpc::DomainError);
}

TEST_CASE("density, cdf and ccdf are consistent") {
  const EffectiveChannel rayleigh{1, 2.0};
  CHECK(pdf(rayleigh, 0.5) == Approx(2.0 * std::exp(-1.0)));
  CHECK(ccdf(rayleigh, 0.5) == Approx(std::exp(-1.0)));

  const EffectiveChannel ch{4, 3.0};
  const auto area = wpc::numerics::integrate([&](double x) { return pdf(ch, x); }, 0.0, 2.0, 1e-12, 1e-14);
  CHECK(area.value == Approx(cdf(ch, 2.0)).epsilon(1e-10));
  CHECK(cdf(ch, 2.0) + ccdf(ch, 2.0) == Approx(1.0));
  CHECK(std::exp(log_pdf(ch, 1.1)) == Approx(pdf(ch, 1.1)));
  CHECK(pdf(ch, 0.0) == 0.0);
  CHECK(ccdf(ch, 0.0) == 1.0);
}

TEST_CASE("sampling reproduces the mean and the cdf") {
  const EffectiveChannel ch{3, 5.0};
  wpc::rng::CounterStream rng(11, 0);
  const int n = 200000;
  double sum = 0.0;
  int below = 0;
  for (int i = 0; i < n; ++i) {
    const double v = sample(ch, rng);
    sum += v;
    below += v < 0.4;
  }
  CHECK(sum / n == Approx(ch.mean()).epsilon(0.01));
  const double p = cdf(ch, 0.4);
  CHECK(std::abs(static_cast<double>(below) / n - p) < 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("reference tail values") {
  CHECK(ccdf({1, 2.0}, 1.0) == Approx(0.1353352832366127));
  CHECK(pdf({2, 1.0}, 1.0) == Approx(0.36787944117144233));
  // e^{-x}(1 + x) at x = 66400 * 1.7154e-6
  const double x = 66400 * 1.7154e-6;
  CHECK(ccdf({2, 66400.0}, 1.7154e-6) == Approx(std::exp(-x) * (1 + x)).epsilon(1e-14));
  CHECK(ccdf({2, 66400.0}, 1.7154e-6) == Approx(0.993986).epsilon(1e-6));
  CHECK_THROWS_AS(ccdf({2, 1.0}, -1.0), wpc::DomainError);
  const auto norm = wpc::numerics::integrate([](double v) { return pdf({6, 2.0}, v); }, 0.0, 60.0, 1e-12, 1e-14);
  CHECK(norm.value == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("million-draw mean") {
  const EffectiveChannel ch{6, 2.0};
  const int n = 1000000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    wpc::rng::CounterStream rng(3, static_cast<std::uint64_t>(i));
    const double v = sample(ch, rng);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::abs(mean - 3.0) <= 3.0 * se);
}
