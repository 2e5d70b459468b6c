#pragma once

#include <cmath>
#include <concepts>

namespace wpc::channel {

/// One family of i.i.d. Nakagami-m links feeding MRT (downlink) or MRC (uplink).
struct NakagamiLink {
  int m = 1;             ///< fading shape, integer >= 1
  int n_antennas = 1;    ///< N1 or N2
  double mean_gain = 1;  ///< per-antenna mean power gain (path loss and antenna gains included)
};

/// Gamma(shape, rate) law of the post-beamforming power gain.
struct EffectiveChannel {
  int shape = 1;
  double rate = 1.0;

  double mean() const { return shape / rate; }
};

EffectiveChannel effective(const NakagamiLink& link);

/// Throws DomainError unless shape >= 1 and rate > 0 (finite).
void validate(const EffectiveChannel& ch);

double pdf(const EffectiveChannel& ch, double x);
double log_pdf(const EffectiveChannel& ch, double x);
double ccdf(const EffectiveChannel& ch, double x);
double cdf(const EffectiveChannel& ch, double x);

template <typename G>
concept UniformSource = requires(G& g) {
  { g.uniform_open() } -> std::convertible_to<double>;
};

/// Gamma draw as a sum of `shape` inverse-CDF exponential draws.
template <UniformSource G>
double sample(const EffectiveChannel& ch, G& rng) {
  double sum = 0.0;
  for (int k = 0; k < ch.shape; ++k) sum -= std::log(rng.uniform_open());
  return sum / ch.rate;
}

} // namespace wpc::channel
