#include "wpc/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wpc/error.hpp"
#include "wpc/numerics.hpp"

namespace wpc::specfun {

namespace {

// Lanczos g = 7, n = 9 (Godfrey's coefficients).
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993227684700473478,  676.520368121885098567009190444019,
    -1259.13921672240287047156078755283, 771.3234287776530788486528258894,
    -176.61502916214059906584551354,     12.507343278686904814458936853,
    -0.13857109526572011689554707,       9.984369578019570859563e-6,
    1.50563273514931155834e-7};

double lanczos_log_gamma(double x) {
  // Valid for x >= 0.5.
  const double z = x - 1.0;
  double sum = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) sum += kLanczos[i] / (z + static_cast<double>(i));
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

bool is_small_integer(double x) { return x == std::floor(x) && x <= 171.0; }

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

void require_shape(int m, double x, const char* who) {
  if (m < 1) throw DomainError(std::string(who) + ": shape must be >= 1");
  if (!(x >= 0.0)) throw DomainError(std::string(who) + ": argument must be >= 0");
}

// e^{-x} sum_{k<m} x^k/k!, Neumaier-compensated.
double poisson_head(int m, double x) {
  if (std::isinf(x)) return 0.0;
  double term = 1.0, sum = 0.0, comp = 0.0;
  for (int k = 0; k < m; ++k) {
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    term *= x / (k + 1);
  }
  return std::exp(-x) * (sum + comp);
}

// e^{-x} sum_{k>=m} x^k/k!, for x below the mode.
double poisson_tail(int m, double x) {
  double log_term = m * std::log(x) - log_gamma(m + 1.0);
  double term = std::exp(log_term - x);
  double sum = 0.0;
  for (int k = m; k < m + 1000; ++k) {
    sum += term;
    term *= x / (k + 1);
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

} // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be > 0");
  if (is_small_integer(x)) return std::log(factorial(static_cast<int>(x) - 1));
  if (x < 0.5) return lanczos_log_gamma(x + 1.0) - std::log(x);
  return lanczos_log_gamma(x);
}

double gamma(double x) {
  if (!(x > 0.0)) throw DomainError("gamma: argument must be > 0");
  if (is_small_integer(x)) return factorial(static_cast<int>(x) - 1);
  if (x < 0.5) return std::exp(lanczos_log_gamma(x + 1.0)) / x;
  return std::exp(lanczos_log_gamma(x));
}

double gamma_upper_int(int m, double x) {
  require_shape(m, x, "gamma_upper_int");
  return factorial(m - 1) * poisson_head(m, x);
}

double reg_upper_gamma(int m, double x) {
  require_shape(m, x, "reg_upper_gamma");
  return poisson_head(m, x);
}

double reg_lower_gamma(int m, double x) {
  require_shape(m, x, "reg_lower_gamma");
  if (x == 0.0) return 0.0;
  if (x < m) return poisson_tail(m, x);
  return 1.0 - poisson_head(m, x);
}

EvalResult gamma_hyp_u(double alpha, double b, double z, double tol) {
  if (!(alpha > 0.0)) throw DomainError("hyp_u: alpha must be > 0");
  if (!(z > 0.0)) throw DomainError("hyp_u: z must be > 0");

  // t = u/(1-u) maps (0, inf) to (0, 1); the integrand becomes
  // u^{alpha-1} (1-u)^{-b} exp(-z u/(1-u)).
  auto mapped = [&](double u) {
    const double one_minus = 1.0 - u;
    if (one_minus <= 0.0) return 0.0;
    const double t = u / one_minus;
    const double log_v = -z * t - b * std::log(one_minus);
    return std::exp(log_v);
  };

  // Head (0, 1/2): for alpha < 1 the u^{alpha-1} singularity is removed with
  // u = w^{1/alpha} / 2, which turns u^{alpha-1} du into 2^{-alpha}/alpha dw.
  numerics::QuadResult head;
  if (alpha < 1.0) {
    const double scale = std::pow(0.5, alpha) / alpha;
    head = numerics::integrate_01(
        [&](double w) { return scale * mapped(0.5 * std::pow(w, 1.0 / alpha)); }, tol, tol);
  } else {
    head = numerics::integrate(
        [&](double u) { return std::pow(u, alpha - 1.0) * mapped(u); }, 0.0, 0.5, tol, tol);
  }
  // Tail (1/2, 1): smooth, with essential decay at u -> 1.
  const numerics::QuadResult tail = numerics::integrate(
      [&](double u) { return std::pow(u, alpha - 1.0) * mapped(u); }, 0.5, 1.0, tol, tol);

  const double value = head.value + tail.value;
  const double err = head.abs_err + tail.abs_err + 4.0 * std::numeric_limits<double>::epsilon() * value;
  return {value, err};
}

EvalResult hyp_u(double alpha, double b, double z, double tol) {
  const EvalResult integral = gamma_hyp_u(alpha, b, z, tol);
  const double g = gamma(alpha);
  return {integral.value / g, integral.abs_err / g};
}

EvalResult whittaker_w(double kappa, double mu, double z, double tol) {
  if (!(z > 0.0)) throw DomainError("whittaker_w: z must be > 0");
  const double alpha = mu - kappa + 0.5;
  if (!(alpha > 0.0))
    throw DomainError("whittaker_w: mu - kappa + 1/2 must be > 0 for the U representation");
  const EvalResult u = hyp_u(alpha, 2.0 * mu + 1.0, z, tol);
  const double prefactor = std::pow(z, mu + 0.5) * std::exp(-0.5 * z);
  return {prefactor * u.value, prefactor * u.abs_err};
}

} // namespace wpc::specfun
