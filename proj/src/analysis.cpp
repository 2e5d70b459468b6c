#include "wpc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "wpc/error.hpp"
#include "wpc/numerics.hpp"
#include "wpc/specfun.hpp"

namespace wpc::analysis {

namespace {

constexpr double kSpillLimit = 1e-12;
constexpr double kOverflowExponent = 700.0;

// Richardson schedule for the series path. The bracketed function of s has
// its nearest singularity at s = 0 (pole of Gamma), one unit from the
// evaluation point, so the stencil half-width order*h/2 stays well inside.
constexpr double kSeriesStepSpan = 0.4;
constexpr double kSeriesMaxStep = 0.1;
constexpr int kSeriesLevels = 6;
constexpr double kSeriesInnerTol = 1e-13;
constexpr double kSeriesMaxAbsErr = 1e-5;

const eh::NonLinearSigmoid& require_sigmoid(const SystemParams& p, const char* who) {
  const auto* s = std::get_if<eh::NonLinearSigmoid>(&p.eh);
  if (s == nullptr)
    throw ModelMismatchError(std::string(who) + ": needs the non-linear sigmoid EH model, got " +
                             std::string(eh::model_name(p.eh)));
  return *s;
}

OutageEstimate finalize(double value, Method method, double abs_err) {
  if (!std::isfinite(value)) throw ConsistencyError("outage estimate is not finite");
  if (value < 0.0) {
    if (value < -kSpillLimit) throw ConsistencyError("outage estimate below 0: " + std::to_string(value));
    value = 0.0;
  } else if (value > 1.0) {
    if (value > 1.0 + kSpillLimit)
      throw ConsistencyError("outage estimate above 1: " + std::to_string(value));
    value = 1.0;
  }
  return {value, method, abs_err};
}

// (x^{K-1}/(K-1)!) / sum_{k<K} x^k/k!, computed without overflow.
double last_term_share(int shape, double x) {
  if (shape == 1) return 1.0;
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  double ratio = 1.0, sum = 1.0;
  for (int k = shape - 1; k > 0; --k) {
    ratio *= k / x;
    sum += ratio;
    if (std::isinf(sum)) return 0.0;
  }
  return 1.0 / sum;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

SystemParams with_rate(SystemParams p, double rate) {
  p.rate = rate;
  return p;
}

SystemParams with_tau(SystemParams p, double tau) {
  p.tau = tau;
  return p;
}

} // namespace

void validate(const SystemParams& p) {
  if (!(p.p_t > 0.0)) throw DomainError("transmit power must be > 0");
  if (!(p.tau > 0.0 && p.tau < 1.0)) throw DomainError("tau must lie strictly between 0 and 1");
  if (!(p.rate > 0.0)) throw DomainError("rate must be > 0");
  if (!(p.sigma2 > 0.0)) throw DomainError("noise power must be > 0");
  if (!(p.theta > 0.0 && p.theta <= 1.0)) throw DomainError("theta must lie in (0, 1]");
  channel::validate(p.dl);
  channel::validate(p.ul);
  if (const auto* s = std::get_if<eh::NonLinearSigmoid>(&p.eh)) eh::validate(*s);
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::quadrature: return "quadrature";
    case Method::series: return "series";
    case Method::asymptotic: return "asymptotic";
    case Method::montecarlo: return "montecarlo";
  }
  return "unknown";
}

double threshold_snr(double rate) { return std::expm1(rate * std::numbers::ln2); }

DerivedConstants derived_constants(const SystemParams& p) {
  const auto& s = require_sigmoid(p, "derived_constants");
  validate(p);
  DerivedConstants d;
  d.gamma_thr = threshold_snr(p.rate);
  d.c = d.gamma_thr * p.sigma2 * (1.0 - p.tau) / (p.theta * s.max_power * p.tau);
  d.c1 = p.dl.rate / (s.a * p.p_t);
  d.c2 = p.ul.rate * d.c * (1.0 + std::exp(s.a * s.b));
  return d;
}

double ul_gain_threshold(const SystemParams& p, double v1) {
  const auto& s = require_sigmoid(p, "ul_gain_threshold");
  if (!(v1 > 0.0)) throw DomainError("ul_gain_threshold: v1 must be > 0");
  const DerivedConstants d = derived_constants(p);
  const double x = s.a * p.p_t * v1;
  if (x > kOverflowExponent) return d.c;
  const double k = std::exp(s.a * s.b);
  return d.c * (1.0 + k) / (-std::expm1(-x)) - d.c * k;
}

OutageEstimate outage_quadrature(const SystemParams& p, double rel_tol) {
  const auto& s = require_sigmoid(p, "outage_quadrature");
  const DerivedConstants d = derived_constants(p);
  const double k = std::exp(s.a * s.b);
  const double ap = s.a * p.p_t;

  auto ul_survival = [&](double y) {
    if (!(y > 0.0)) return 0.0;
    const double v_thr = d.c * (1.0 + k) / y - d.c * k;
    return std::isfinite(v_thr) ? channel::ccdf(p.ul, v_thr) : 0.0;
  };

  numerics::QuadResult q;
  if (d.c1 < 1.0) {
    // u = (1-y)^{c1} = e^{-lambda1 x}; with w = -ln u the Jacobian and the
    // downlink density collapse to the Gamma(S) kernel w^{S-1} / Gamma(S).
    const double log_norm = specfun::log_gamma(p.dl.shape);
    const int shape = p.dl.shape;
    q = numerics::integrate_01(
        [&](double u) {
          const double w = -std::log(u);
          const double y = -std::expm1(-w / d.c1);
          const double kernel =
              shape == 1 ? 1.0 : std::exp((shape - 1) * std::log(w) - log_norm);
          return ul_survival(y) * kernel;
        },
        rel_tol, rel_tol);
  } else {
    const double log_ap = std::log(ap);
    q = numerics::integrate_01(
        [&](double y) {
          const double survival = ul_survival(y);
          if (survival == 0.0) return 0.0;
          const double neg_log = -std::log1p(-y);
          const double x = neg_log / ap;
          return survival * std::exp(channel::log_pdf(p.dl, x) - log_ap + neg_log);
        },
        rel_tol, rel_tol);
  }
  return finalize(1.0 - q.value, Method::quadrature, q.abs_err);
}

OutageEstimate outage_series(const SystemParams& p) {
  const auto& s = require_sigmoid(p, "outage_series");
  const DerivedConstants d = derived_constants(p);
  if (p.dl.shape > kMaxSeriesShape)
    throw DomainError("outage_series: downlink shape " + std::to_string(p.dl.shape) +
                      " exceeds " + std::to_string(kMaxSeriesShape) + "; use the quadrature path");

  const int order = p.dl.shape - 1;
  const int terms = p.ul.shape;
  const double h0 = order == 0 ? 0.0 : std::min(kSeriesMaxStep, kSeriesStepSpan / order);

  // D_l = d^order/ds^order [Gamma(c1 s) U(c1 s, l, c2)] at s = 1.
  std::vector<double> deriv(terms), deriv_err(terms);
  for (int l = 0; l < terms; ++l) {
    const auto bracket = [&, l](double sv) {
      return specfun::gamma_hyp_u(d.c1 * sv, l, d.c2, kSeriesInnerTol).value;
    };
    const numerics::DiffResult r =
        numerics::richardson(bracket, {order, 1.0, h0, kSeriesLevels});
    if (!std::isfinite(r.value)) throw PrecisionError("outage_series: derivative is not finite", 0.0);
    deriv[l] = r.value;
    deriv_err[l] = order == 0 ? 0.0 : r.abs_err;
  }

  const double q = p.ul.rate * d.c * std::exp(s.a * s.b);
  const double r_base = 1.0 + std::exp(-s.a * s.b);

  double sum = 0.0, comp = 0.0, max_term = 0.0, err_sum = 0.0;
  double q_pow = 1.0;  // q^k / k!
  for (int kk = 0; kk < terms; ++kk) {
    double r_pow = 1.0;
    for (int l = 0; l <= kk; ++l) {
      const double coef = q_pow * binomial(kk, l) * ((kk - l) % 2 == 0 ? 1.0 : -1.0) * r_pow;
      const double term = coef * deriv[l];
      const double t = sum + term;
      comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
      sum = t;
      max_term = std::max(max_term, std::abs(term));
      err_sum += std::abs(coef) * deriv_err[l];
      r_pow *= r_base;
    }
    q_pow *= q / (kk + 1);
  }
  sum += comp;

  const double prefactor =
      d.c1 * (order % 2 == 0 ? 1.0 : -1.0) / factorial(order) * std::exp(-p.ul.rate * d.c);
  // Every bracket underflowed: no harvested energy reaches the threshold.
  if (max_term == 0.0) return finalize(1.0, Method::series, 0.0);
  const double ratio = max_term / std::abs(sum);
  if (!(ratio <= kSeriesCancellationLimit))
    throw PrecisionError("outage_series: alternating sum cancels (max term / sum = " +
                             std::to_string(ratio) + ")",
                         ratio);
  const double abs_err = std::abs(prefactor) * err_sum;
  if (!(abs_err <= kSeriesMaxAbsErr))
    throw PrecisionError("outage_series: derivative error estimate " + std::to_string(abs_err) +
                             " too large",
                         ratio);
  const double value = 1.0 - prefactor * sum;
  if (value < -kSpillLimit || value > 1.0 + kSpillLimit)
    throw PrecisionError("outage_series: result " + std::to_string(value) + " outside [0, 1]", ratio);
  return finalize(value, Method::series, abs_err);
}

OutageEstimate outage_asymptotic(const SystemParams& p) {
  const DerivedConstants d = derived_constants(p);
  return finalize(specfun::reg_lower_gamma(p.ul.shape, p.ul.rate * d.c), Method::asymptotic, 0.0);
}

double throughput(const SystemParams& p, const OutageEstimate& outage) {
  if (!(outage.value >= 0.0 && outage.value <= 1.0))
    throw DomainError("throughput: outage probability outside [0, 1]");
  return p.rate * (1.0 - p.tau) * (1.0 - outage.value);
}

double throughput_upper_bound(const SystemParams& p) { return p.rate * (1.0 - p.tau); }

double throughput_asymptotic(const SystemParams& p) { return throughput(p, outage_asymptotic(p)); }

double rate_alpha(const SystemParams& p) {
  const auto& s = require_sigmoid(p, "rate_alpha");
  return p.ul.rate * p.sigma2 * (1.0 - p.tau) / (p.theta * s.max_power * p.tau);
}

double tau_beta(const SystemParams& p) {
  const auto& s = require_sigmoid(p, "tau_beta");
  return p.ul.rate * p.sigma2 * threshold_snr(p.rate) / (p.theta * s.max_power);
}

double rate_fixed_point_rhs(const SystemParams& p, double rate) {
  const double alpha = rate_alpha(p);
  const double x = alpha * threshold_snr(rate);
  return 1.0 / (std::numbers::ln2 * std::exp2(rate) * alpha * last_term_share(p.ul.shape, x));
}

double tau_fixed_point_rhs(const SystemParams& p, double tau) {
  const double y = tau_beta(p) * (1.0 - tau) / tau;
  return y * last_term_share(p.ul.shape, y);
}

Optimum optimal_rate_asymptotic(const SystemParams& p) {
  validate(p);
  const double alpha = rate_alpha(p);
  const int shape = p.ul.shape;
  // Stationarity of R Q(K, alpha (2^R - 1)), divided through by the positive
  // factor Gamma(K, x) e^{x}.
  auto g = [&](double r) {
    const double x = alpha * threshold_snr(r);
    return r * std::numbers::ln2 * std::exp2(r) * alpha * last_term_share(shape, x) - 1.0;
  };
  constexpr double lo = 1e-6;
  double hi = 1.0;
  while (!(g(hi) > 0.0)) {
    hi *= 2.0;
    if (hi > 1000.0) throw BracketError("optimal_rate_asymptotic: cannot bracket the optimum");
  }
  if (!(g(lo) < 0.0)) throw BracketError("optimal_rate_asymptotic: optimum below 1e-6 bits/s/Hz");
  const double r_star = numerics::find_root_bracketed(g, lo, hi, 1e-10);
  return {r_star, throughput_asymptotic(with_rate(p, r_star))};
}

Optimum optimal_tau_asymptotic(const SystemParams& p) {
  validate(p);
  constexpr double eps = 1e-9;
  auto f = [&](double tau) { return tau - tau_fixed_point_rhs(p, tau); };
  const double tau_star = numerics::find_root_bracketed(f, eps, 1.0 - eps, 1e-12);
  return {tau_star, throughput_asymptotic(with_tau(p, tau_star))};
}

Optimum search_rate_asymptotic(const SystemParams& p, double tol) {
  validate(p);
  auto th = [&](double r) { return throughput_asymptotic(with_rate(p, r)); };
  double hi = 1.0;
  while (hi < 1024.0 && th(2.0 * hi) > th(hi)) hi *= 2.0;
  const auto best = numerics::maximize_quasiconcave(th, 1e-6, 2.0 * hi, tol);
  return {best.x, best.value};
}

Optimum search_tau_asymptotic(const SystemParams& p, double tol) {
  validate(p);
  auto th = [&](double tau) { return throughput_asymptotic(with_tau(p, tau)); };
  const auto best = numerics::maximize_quasiconcave(th, 1e-9, 1.0 - 1e-9, tol);
  return {best.x, best.value};
}

} // namespace wpc::analysis
