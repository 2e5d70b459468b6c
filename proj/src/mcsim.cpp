#include "wpc/mcsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>
#include <vector>

#include "wpc/error.hpp"
#include "wpc/random.hpp"

namespace wpc::mcsim {

namespace {

struct Partial {
  std::int64_t outages = 0;
  double harvested = 0.0;
  double snr = 0.0;
};

Partial run_batch(const analysis::SystemParams& p, double gamma_thr, std::uint64_t seed,
                  std::int64_t first, std::int64_t last) {
  Partial part;
  const double snr_scale = p.theta * p.tau / ((1.0 - p.tau) * p.sigma2);
  for (std::int64_t i = first; i < last; ++i) {
    rng::CounterStream stream(seed, static_cast<std::uint64_t>(i));
    const double v1 = channel::sample(p.dl, stream);
    const double v2 = channel::sample(p.ul, stream);
    const double p_eh = eh::harvested_power(p.eh, p.p_t * v1);
    const double snr = snr_scale * p_eh * v2;
    part.harvested += p_eh;
    part.snr += snr;
    if (snr < gamma_thr) ++part.outages;
  }
  return part;
}

} // namespace

unsigned default_workers() {
  if (const char* env = std::getenv("WPC_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SimResult simulate(const analysis::SystemParams& p, const SimConfig& cfg, unsigned workers) {
  analysis::validate(p);
  if (cfg.n_samples < 1) throw DomainError("simulate: n_samples must be >= 1");
  if (cfg.batch < 1) throw DomainError("simulate: batch must be >= 1");

  const double gamma_thr = analysis::threshold_snr(p.rate);
  const std::int64_t n_batches = (cfg.n_samples + cfg.batch - 1) / cfg.batch;
  std::vector<Partial> partials(static_cast<std::size_t>(n_batches));

  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t b = next++; b < n_batches; b = next++) {
      const std::int64_t first = b * cfg.batch;
      const std::int64_t last = std::min(cfg.n_samples, first + cfg.batch);
      partials[static_cast<std::size_t>(b)] = run_batch(p, gamma_thr, cfg.seed, first, last);
    }
  };

  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::int64_t>(workers, n_batches));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  Partial total;
  for (const auto& part : partials) {
    total.outages += part.outages;
    total.harvested += part.harvested;
    total.snr += part.snr;
  }

  const auto n = static_cast<double>(cfg.n_samples);
  SimResult r;
  r.n_samples = cfg.n_samples;
  r.outages = total.outages;
  r.outage = static_cast<double>(total.outages) / n;
  r.ci95_halfwidth = 1.96 * std::sqrt(r.outage * (1.0 - r.outage) / n);
  r.mean_harvested = total.harvested / n;
  const double mean_snr = total.snr / n;
  r.mean_snr_db = mean_snr > 0.0 ? 10.0 * std::log10(mean_snr)
                                 : -std::numeric_limits<double>::infinity();
  r.throughput = p.rate * (1.0 - p.tau) * (1.0 - r.outage);
  r.ci_warning = cfg.n_samples < 1000 || n * std::min(r.outage, 1.0 - r.outage) < 20.0;
  return r;
}

} // namespace wpc::mcsim
