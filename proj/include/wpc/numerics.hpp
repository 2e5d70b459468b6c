#pragma once

#include <functional>

namespace wpc::numerics {

using RealFn = std::function<double(double)>;

struct QuadResult {
  double value = 0.0;
  double abs_err = 0.0;
  int evaluations = 0;
};

inline constexpr int kMaxSubdivisions = 10000;

/// Adaptive 15-point Gauss-Kronrod on [lo, hi] with global bisection of the
/// interval carrying the largest error. Nodes never touch the endpoints, so
/// integrable endpoint singularities are admissible.
///
/// Succeeds when abs_err <= max(abs_tol, rel_tol * |value|); otherwise throws
/// ConvergenceError carrying the best estimate once `max_subdivisions`
/// intervals are in play.
QuadResult integrate(const RealFn& f, double lo, double hi, double rel_tol, double abs_tol,
                     int max_subdivisions = kMaxSubdivisions);

/// integrate() on the unit interval.
QuadResult integrate_01(const RealFn& f, double rel_tol, double abs_tol);

struct DiffSpec {
  int order = 1;       ///< n-th derivative, 0..kMaxDiffOrder
  double point = 0.0;
  double h0 = 0.0;     ///< initial step; <= 0 selects 1e-2 * max(1, |point|)
  int levels = 6;      ///< step halvings, >= 2
};

inline constexpr int kMaxDiffOrder = 12;

struct DiffResult {
  double value = 0.0;
  double abs_err = 0.0;      ///< Ridders-style error estimate of the accepted extrapolant
  double noise_floor = 0.0;  ///< rounding amplification of the finest stencil used
  int levels_used = 0;
};

/// Central-difference n-th derivative extrapolated in h^2 across step
/// halvings (Neville tableau). Stops early once successive diagonal
/// extrapolants agree to 1e-9 relative, or once they start to diverge, and
/// returns the tableau entry with the smallest error estimate.
DiffResult richardson(const RealFn& f, const DiffSpec& spec);

/// richardson() returning only the value. Throws InstabilityError when the
/// accepted extrapolant is neither relatively accurate nor explained by
/// rounding noise.
double richardson_derivative(const RealFn& f, const DiffSpec& spec);

/// Brent's safeguarded inverse-quadratic / secant / bisection root finder.
/// Requires g(lo) * g(hi) <= 0; the returned point lies in [lo, hi].
double find_root_bracketed(const RealFn& g, double lo, double hi, double tol = 1e-10);

struct MaxResult {
  double x = 0.0;
  double value = 0.0;
  int iterations = 0;
};

/// Golden-section search for the maximizer of a strictly quasi-concave
/// function on [lo, hi]; stops when the bracket is narrower than `tol`.
MaxResult maximize_quasiconcave(const RealFn& f, double lo, double hi, double tol = 1e-6);

} // namespace wpc::numerics
