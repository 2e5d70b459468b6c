#include "wpc/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "wpc/error.hpp"

namespace wpc::numerics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Kronrod abscissae on [-1, 1], non-negative half; odd indices are the
// 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo;
  double hi;
  double value;
  double err;
  bool operator<(const Segment& o) const { return err < o.err; }
};

Segment gauss_kronrod15(const RealFn& f, double lo, double hi) {
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  std::array<double, 15> fv{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv[j] = f(centre - dx);
    fv[14 - j] = f(centre + dx);
  }
  fv[7] = f(centre);

  double res_k = kWgk[7] * fv[7];
  double res_g = kWg[3] * fv[7];
  double res_abs = std::abs(res_k);
  for (int j = 0; j < 7; ++j) {
    const double pair = fv[j] + fv[14 - j];
    res_k += kWgk[j] * pair;
    res_abs += kWgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
    if (j % 2 == 1) res_g += kWg[j / 2] * pair;
  }
  const double mean = 0.5 * res_k;
  double res_asc = kWgk[7] * std::abs(fv[7] - mean);
  for (int j = 0; j < 7; ++j)
    res_asc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));

  res_k *= half;
  res_abs *= std::abs(half);
  res_asc *= std::abs(half);
  double err = std::abs((res_k - res_g * half));
  if (res_asc != 0.0 && err != 0.0)
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  if (res_abs > std::numeric_limits<double>::min() / (50.0 * kEps))
    err = std::max(50.0 * kEps * res_abs, err);
  return {lo, hi, res_k, err};
}

bool splittable(const Segment& s) {
  const double mid = 0.5 * (s.lo + s.hi);
  const double scale = std::max({std::abs(s.lo), std::abs(s.hi), 1e-300});
  return (s.hi - s.lo) > 200.0 * kEps * scale && mid > s.lo && mid < s.hi;
}

} // namespace

QuadResult integrate(const RealFn& f, double lo, double hi, double rel_tol, double abs_tol,
                     int max_subdivisions) {
  if (!(hi > lo)) throw DomainError("integrate: empty or reversed interval");

  std::priority_queue<Segment> active;
  std::vector<Segment> frozen;
  int evaluations = 15;
  active.push(gauss_kronrod15(f, lo, hi));
  int segments = 1;

  auto totals = [&] {
    double v = 0.0, e = 0.0;
    auto copy = active;
    while (!copy.empty()) {
      v += copy.top().value;
      e += copy.top().err;
      copy.pop();
    }
    for (const auto& s : frozen) {
      v += s.value;
      e += s.err;
    }
    return std::pair{v, e};
  };

  double value = active.top().value;
  double err = active.top().err;
  while (true) {
    if (!std::isfinite(value) || !std::isfinite(err))
      throw ConvergenceError("integrate: non-finite integrand values", value, err);
    if (err <= std::max(abs_tol, rel_tol * std::abs(value))) break;
    if (active.empty() || segments >= max_subdivisions) {
      throw ConvergenceError("integrate: tolerance not met after " + std::to_string(segments) +
                                 " subdivisions",
                             value, err);
    }
    Segment worst = active.top();
    active.pop();
    if (!splittable(worst)) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.lo + worst.hi);
    Segment left = gauss_kronrod15(f, worst.lo, mid);
    Segment right = gauss_kronrod15(f, mid, worst.hi);
    evaluations += 30;
    ++segments;
    value += left.value + right.value - worst.value;
    err += left.err + right.err - worst.err;
    active.push(left);
    active.push(right);
    // Running sums drift; resynchronise now and then.
    if (segments % 64 == 0) std::tie(value, err) = totals();
  }
  std::tie(value, err) = totals();
  return {value, err, evaluations};
}

QuadResult integrate_01(const RealFn& f, double rel_tol, double abs_tol) {
  return integrate(f, 0.0, 1.0, rel_tol, abs_tol);
}

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

struct Stencil {
  double value;
  double noise;
};

Stencil central_difference(const RealFn& f, int order, double x, double h) {
  double sum = 0.0;
  double mag = 0.0;
  for (int k = 0; k <= order; ++k) {
    const double w = (k % 2 == 0 ? 1.0 : -1.0) * binomial(order, k);
    const double fx = f(x + (0.5 * order - k) * h);
    sum += w * fx;
    mag += std::abs(w * fx);
  }
  const double scale = std::pow(h, order);
  return {sum / scale, kEps * mag / scale};
}

} // namespace

DiffResult richardson(const RealFn& f, const DiffSpec& spec) {
  if (spec.order < 0 || spec.order > kMaxDiffOrder)
    throw DomainError("richardson: derivative order outside 0.." + std::to_string(kMaxDiffOrder));
  if (spec.levels < 2) throw DomainError("richardson: need at least two levels");
  if (spec.order == 0) return {f(spec.point), 0.0, 0.0, 0};

  const double h0 = spec.h0 > 0.0 ? spec.h0 : 1e-2 * std::max(1.0, std::abs(spec.point));
  std::vector<std::vector<double>> table(spec.levels);
  DiffResult best{0.0, std::numeric_limits<double>::infinity(), 0.0, 0};

  double h = h0;
  for (int i = 0; i < spec.levels; ++i, h *= 0.5) {
    const Stencil st = central_difference(f, spec.order, spec.point, h);
    table[i].resize(i + 1);
    table[i][0] = st.value;
    if (i == 0) best = {st.value, std::numeric_limits<double>::infinity(), st.noise, 1};
    double factor = 1.0;
    for (int j = 1; j <= i; ++j) {
      factor *= 4.0;
      table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
      const double e = std::max(std::abs(table[i][j] - table[i][j - 1]),
                                std::abs(table[i][j] - table[i - 1][j - 1]));
      if (e <= best.abs_err) best = {table[i][j], e, st.noise, i + 1};
    }
    if (i == 0) continue;
    const double step = std::abs(table[i][i] - table[i - 1][i - 1]);
    if (step <= 1e-9 * std::abs(table[i][i])) break;
    if (i >= 2 && step >= 2.0 * best.abs_err) break;
  }
  return best;
}

double richardson_derivative(const RealFn& f, const DiffSpec& spec) {
  const DiffResult r = richardson(f, spec);
  if (!std::isfinite(r.value))
    throw InstabilityError("richardson: non-finite derivative estimate");
  if (spec.order > 0 && !(r.abs_err <= 1e-6 * std::abs(r.value)) &&
      !(r.abs_err <= 1e3 * r.noise_floor)) {
    throw InstabilityError("richardson: extrapolants diverge (estimate " + std::to_string(r.value) +
                           ", error " + std::to_string(r.abs_err) + ")");
  }
  return r.value;
}

double find_root_bracketed(const RealFn& g, double lo, double hi, double tol) {
  double a = lo, b = hi;
  double fa = g(a), fb = g(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (!(std::isfinite(fa) && std::isfinite(fb)) || (fa > 0.0) == (fb > 0.0))
    throw BracketError("find_root_bracketed: no sign change on [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");

  double c = a, fc = fa;
  double d = b - a, e = d;
  double best_x = std::abs(fa) < std::abs(fb) ? a : b;
  double best_f = std::min(std::abs(fa), std::abs(fb));

  for (int iter = 0; iter < 500; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * kEps * std::abs(b) + 0.25 * tol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol1 || fb == 0.0) break;

    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0)
        q = -q;
      else
        p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = d;
      }
    } else {
      d = m;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (m > 0.0 ? tol1 : -tol1);
    b = std::clamp(b, std::min(lo, hi), std::max(lo, hi));
    fb = g(b);
    if (std::abs(fb) < best_f) {
      best_f = std::abs(fb);
      best_x = b;
    }
  }
  return std::abs(fb) <= best_f ? b : best_x;
}

MaxResult maximize_quasiconcave(const RealFn& f, double lo, double hi, double tol) {
  if (!(hi > lo)) throw DomainError("maximize_quasiconcave: empty interval");
  constexpr double kInvPhi = 0.6180339887498948482;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  int iterations = 0;
  while (b - a > tol) {
    if (!std::isfinite(f1) || !std::isfinite(f2))
      throw DomainError("maximize_quasiconcave: non-finite objective");
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
    ++iterations;
  }
  const double x = 0.5 * (a + b);
  return {x, f(x), iterations};
}

} // namespace wpc::numerics
