#include "wpc/channel.hpp"

#include <cmath>
#include <limits>

#include "wpc/error.hpp"
#include "wpc/specfun.hpp"

namespace wpc::channel {

EffectiveChannel effective(const NakagamiLink& link) {
  if (link.m < 1) throw DomainError("NakagamiLink: m must be an integer >= 1");
  if (link.n_antennas < 1) throw DomainError("NakagamiLink: antenna count must be >= 1");
  if (!(link.mean_gain > 0.0) || !std::isfinite(link.mean_gain))
    throw DomainError("NakagamiLink: mean gain must be positive");
  return {link.m * link.n_antennas, link.m / link.mean_gain};
}

void validate(const EffectiveChannel& ch) {
  if (ch.shape < 1) throw DomainError("EffectiveChannel: shape must be >= 1");
  if (!(ch.rate > 0.0) || !std::isfinite(ch.rate))
    throw DomainError("EffectiveChannel: rate must be positive");
}

double log_pdf(const EffectiveChannel& ch, double x) {
  if (!(x >= 0.0)) throw DomainError("pdf: x must be >= 0");
  if (x == 0.0)
    return ch.shape == 1 ? std::log(ch.rate) : -std::numeric_limits<double>::infinity();
  return ch.shape * std::log(ch.rate) + (ch.shape - 1) * std::log(x) - ch.rate * x -
         specfun::log_gamma(ch.shape);
}

double pdf(const EffectiveChannel& ch, double x) { return std::exp(log_pdf(ch, x)); }

double ccdf(const EffectiveChannel& ch, double x) {
  if (!(x >= 0.0)) throw DomainError("ccdf: x must be >= 0");
  if (ch.shape == 1) return std::exp(-ch.rate * x);
  // Running-term recurrence with compensated summation lives in specfun.
  return specfun::reg_upper_gamma(ch.shape, ch.rate * x);
}

double cdf(const EffectiveChannel& ch, double x) {
  if (!(x >= 0.0)) throw DomainError("cdf: x must be >= 0");
  if (ch.shape == 1) return -std::expm1(-ch.rate * x);
  return specfun::reg_lower_gamma(ch.shape, ch.rate * x);
}

} // namespace wpc::channel
