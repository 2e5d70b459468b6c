#pragma once

// Special functions for the outage expressions: the gamma function, the
// integer-shape incomplete gamma functions, Tricomi's confluent
// hypergeometric U and Whittaker's W.

namespace wpc::specfun {

struct EvalResult {
  double value = 0.0;
  double abs_err = 0.0;
};

/// Default tolerance for the integral representation of U: the quadrature
/// stops at 1e-10 absolute or 1e-10 relative, whichever is looser.
inline constexpr double kHypUTolerance = 1e-10;

/// Gamma function for x > 0. Integer arguments up to 171 are exact
/// factorials; everything else goes through a Lanczos sum in log space.
double gamma(double x);

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// Upper incomplete gamma Gamma(m, x) for integer m >= 1, via the finite
/// series (m-1)! e^{-x} sum_{k<m} x^k / k!.
double gamma_upper_int(int m, double x);

/// Regularised upper incomplete gamma Q(m, x) = Gamma(m, x) / Gamma(m).
double reg_upper_gamma(int m, double x);

/// Regularised lower incomplete gamma P(m, x) = gamma(m, x) / Gamma(m).
double reg_lower_gamma(int m, double x);

/// Tricomi U(alpha, b, z) = 1/Gamma(alpha) int_0^inf e^{-zt} t^{alpha-1} (1+t)^{b-alpha-1} dt
/// for alpha > 0, z > 0, any real b.
EvalResult hyp_u(double alpha, double b, double z, double tol = kHypUTolerance);

/// Gamma(alpha) * U(alpha, b, z), i.e. the bare integral. Avoids the
/// divide-then-multiply round trip when the caller needs the product.
EvalResult gamma_hyp_u(double alpha, double b, double z, double tol = kHypUTolerance);

/// Whittaker W_{kappa,mu}(z) = z^{mu+1/2} e^{-z/2} U(mu - kappa + 1/2, 2 mu + 1, z).
EvalResult whittaker_w(double kappa, double mu, double z, double tol = kHypUTolerance);

} // namespace wpc::specfun
