#pragma once

#include <cstdint>

#include "wpc/analysis.hpp"

namespace wpc::mcsim {

struct SimConfig {
  std::int64_t n_samples = 1'000'000;
  std::uint64_t seed = 1;
  std::int64_t batch = 65'536;  ///< trials per work unit
};

struct SimResult {
  double outage = 0.0;
  double ci95_halfwidth = 0.0;
  double mean_harvested = 0.0;  ///< [W]
  double mean_snr_db = 0.0;     ///< 10 log10 of the mean linear SNR
  double throughput = 0.0;
  std::int64_t n_samples = 0;
  std::int64_t outages = 0;
  /// Normal-approximation CI is unreliable: n min(p, 1-p) < 20 or n < 1000.
  bool ci_warning = false;

  double standard_error() const { return ci95_halfwidth / 1.96; }
};

/// Default worker count: WPC_THREADS if set and positive, otherwise the
/// hardware concurrency.
unsigned default_workers();

/// Harvest-then-transmit trials with any EH model. Trial i draws from a
/// counter-based stream keyed by (seed, i) and batch partial sums are
/// reduced in batch order, so the result is bit-identical for any
/// `workers` value.
SimResult simulate(const analysis::SystemParams& p, const SimConfig& cfg, unsigned workers = 0);

} // namespace wpc::mcsim
