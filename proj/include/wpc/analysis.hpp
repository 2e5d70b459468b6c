#pragma once

#include <string_view>

#include "wpc/channel.hpp"
#include "wpc/ehmodel.hpp"

namespace wpc::analysis {

/// One harvest-then-transmit link. The slot length is normalised to 1, so
/// tau and 1 - tau are the harvesting and transmission fractions.
struct SystemParams {
  double p_t = 1.0;     ///< PS transmit power [W]
  double tau = 0.5;     ///< harvesting fraction, 0 < tau < 1
  double rate = 1.0;    ///< R [bits/s/Hz]
  double sigma2 = 1.0;  ///< noise power at the IRS [W]
  double theta = 1.0;   ///< WD amplifier efficiency, 0 < theta <= 1
  channel::EffectiveChannel dl;
  channel::EffectiveChannel ul;
  eh::EhModel eh = eh::Linear{};
};

void validate(const SystemParams& p);

/// Threshold SNR and the constants of the closed-form outage expressions.
struct DerivedConstants {
  double gamma_thr = 0.0;  ///< 2^R - 1
  double c = 0.0;          ///< gamma_thr sigma2 (1 - tau) / (theta M tau)
  double c1 = 0.0;         ///< lambda1 / (a p_t)
  double c2 = 0.0;         ///< lambda2 c (1 + e^{ab})
};

enum class Method { quadrature, series, asymptotic, montecarlo };

std::string_view method_name(Method m);

struct OutageEstimate {
  double value = 0.0;
  Method method = Method::quadrature;
  double abs_err = 0.0;
};

/// 2^R - 1, evaluated without cancellation for small R.
double threshold_snr(double rate);

/// Requires a NonLinearSigmoid EH model (ModelMismatchError otherwise).
DerivedConstants derived_constants(const SystemParams& p);

/// Smallest uplink gain v2 that avoids outage when the downlink gain is v1.
double ul_gain_threshold(const SystemParams& p, double v1);

inline constexpr double kDefaultQuadratureTol = 1e-10;

/// Outage as one minus a unit-interval integral of ccdf(v2 threshold) against
/// the downlink density. When c1 < 1 the integrable (1-y)^{c1-1} endpoint
/// singularity is removed with u = (1-y)^{c1}.
OutageEstimate outage_quadrature(const SystemParams& p, double rel_tol = kDefaultQuadratureTol);

/// Largest downlink shape m1 N1 the series path accepts; beyond it the
/// derivative order is out of reach of double-precision differencing.
inline constexpr int kMaxSeriesShape = 10;

/// Cancellation guard: max |term| / |sum| above this raises PrecisionError.
inline constexpr double kSeriesCancellationLimit = 1e6;

/// Closed-form double series in Gamma * U with an (m1 N1 - 1)-th derivative
/// in the auxiliary variable s, taken by Richardson extrapolation. Throws
/// DomainError for m1 N1 > kMaxSeriesShape and PrecisionError when the
/// alternating sum or the derivative cannot be trusted; callers fall back
/// to outage_quadrature in both cases.
OutageEstimate outage_series(const SystemParams& p);

/// High-power limit P(v2 < c); independent of the downlink.
OutageEstimate outage_asymptotic(const SystemParams& p);

double throughput(const SystemParams& p, const OutageEstimate& outage);

/// R (1 - tau) when nothing is ever in outage.
double throughput_upper_bound(const SystemParams& p);

double throughput_asymptotic(const SystemParams& p);

struct Optimum {
  double argument = 0.0;    ///< R* or tau*
  double throughput = 0.0;  ///< asymptotic throughput at the argument
};

/// Noise-to-saturation constants of the optimality conditions.
double rate_alpha(const SystemParams& p);  ///< lambda2 sigma2 (1 - tau) / (theta M tau)
double tau_beta(const SystemParams& p);    ///< lambda2 sigma2 (2^R - 1) / (theta M)

/// Right-hand side of the fixed-point condition for the optimal rate.
double rate_fixed_point_rhs(const SystemParams& p, double rate);
/// Right-hand side of the fixed-point condition for the optimal tau.
double tau_fixed_point_rhs(const SystemParams& p, double tau);

/// Unique maximiser over R of the asymptotic throughput, as a bracketed
/// root of the stationarity condition.
Optimum optimal_rate_asymptotic(const SystemParams& p);

/// Unique maximiser over tau of the asymptotic throughput.
Optimum optimal_tau_asymptotic(const SystemParams& p);

/// Golden-section maximisation of the asymptotic throughput; an independent
/// route to the two optima above.
Optimum search_rate_asymptotic(const SystemParams& p, double tol = 1e-8);
Optimum search_tau_asymptotic(const SystemParams& p, double tol = 1e-8);

} // namespace wpc::analysis
