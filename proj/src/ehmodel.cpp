#include "wpc/ehmodel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "wpc/error.hpp"

namespace wpc::eh {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_power(double p_r) {
  if (!(p_r >= 0.0)) throw DomainError("harvested_power: received power must be >= 0");
}

void check_samples(std::span<const DataPoint> data, const char* who) {
  if (data.size() < 4) throw DomainError(std::string(who) + ": need at least 4 data points");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!(data[i].p_out >= 0.0) || !(data[i].p_in >= 0.0))
      throw DomainError(std::string(who) + ": powers must be non-negative");
    if (i > 0 && !(data[i].p_in > data[i - 1].p_in))
      throw DomainError(std::string(who) + ": input powers must be strictly increasing");
  }
}

} // namespace

Tabulated::Tabulated(std::vector<DataPoint> samples) : samples_(std::move(samples)) {
  check_samples(samples_, "Tabulated");
  const std::size_t n = samples_.size();
  second_.assign(n, 0.0);
  // Tridiagonal solve for the natural spline (zero curvature at both ends).
  std::vector<double> u(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = samples_[i].p_in - samples_[i - 1].p_in;
    const double h1 = samples_[i + 1].p_in - samples_[i].p_in;
    const double sig = h0 / (h0 + h1);
    const double p = sig * second_[i - 1] + 2.0;
    second_[i] = (sig - 1.0) / p;
    const double d = (samples_[i + 1].p_out - samples_[i].p_out) / h1 -
                     (samples_[i].p_out - samples_[i - 1].p_out) / h0;
    u[i] = (6.0 * d / (h0 + h1) - sig * u[i - 1]) / p;
  }
  second_[n - 1] = 0.0;
  for (std::size_t k = n - 1; k-- > 0;) second_[k] = second_[k] * second_[k + 1] + u[k];
}

double Tabulated::operator()(double p_in) const {
  require_power(p_in);
  const DataPoint& first = samples_.front();
  const DataPoint& last = samples_.back();
  if (p_in >= last.p_in) return last.p_out;
  if (p_in <= first.p_in) return first.p_in > 0.0 ? first.p_out * (p_in / first.p_in) : first.p_out;

  const auto hi_it = std::upper_bound(samples_.begin(), samples_.end(), p_in,
                                      [](double x, const DataPoint& s) { return x < s.p_in; });
  const std::size_t hi = static_cast<std::size_t>(hi_it - samples_.begin());
  const std::size_t lo = hi - 1;
  const double h = samples_[hi].p_in - samples_[lo].p_in;
  const double a = (samples_[hi].p_in - p_in) / h;
  const double b = (p_in - samples_[lo].p_in) / h;
  const double y = a * samples_[lo].p_out + b * samples_[hi].p_out +
                   ((a * a * a - a) * second_[lo] + (b * b * b - b) * second_[hi]) * (h * h) / 6.0;
  return std::max(0.0, y);
}

void validate(const NonLinearSigmoid& m) {
  if (!(m.max_power > 0.0) || !(m.a > 0.0) || !(m.b > 0.0))
    throw DomainError("NonLinearSigmoid: M, a and b must all be positive");
}

double harvested_power(const NonLinearSigmoid& m, double p_r) {
  require_power(p_r);
  const double ap = m.a * p_r;
  return m.max_power * (-std::expm1(-ap)) / (1.0 + std::exp(m.a * m.b - ap));
}

double harvested_power(const EhModel& model, double p_r) {
  require_power(p_r);
  return std::visit(Overloaded{
                        [&](const NonLinearSigmoid& m) { return harvested_power(m, p_r); },
                        [&](const Linear& m) { return m.eta * p_r; },
                        [&](const PiecewiseLinear& m) { return std::min(m.eta * p_r, m.max_power); },
                        [&](const Tabulated& m) { return m(p_r); },
                    },
                    model);
}

double max_slope(const NonLinearSigmoid& m) {
  const double k = std::exp(m.a * m.b);
  return m.max_power * m.a * (1.0 + k) / (4.0 * k);
}

std::string_view model_name(const EhModel& model) {
  return std::visit(Overloaded{
                        [](const NonLinearSigmoid&) { return std::string_view("sigmoid"); },
                        [](const Linear&) { return std::string_view("linear"); },
                        [](const PiecewiseLinear&) { return std::string_view("piecewise"); },
                        [](const Tabulated&) { return std::string_view("tabulated"); },
                    },
                    model);
}

namespace {

using Point3 = std::array<double, 3>;

constexpr int kFitMaxIterations = 2000;
constexpr double kFitDiameterTol = 1e-8;

struct Simplex {
  std::array<Point3, 4> x;
  std::array<double, 4> f;

  void sort() {
    std::array<int, 4> idx{0, 1, 2, 3};
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return f[i] < f[j]; });
    Simplex s = *this;
    for (int i = 0; i < 4; ++i) {
      x[i] = s.x[idx[i]];
      f[i] = s.f[idx[i]];
    }
  }

  double diameter() const {
    double d = 0.0;
    for (int i = 1; i < 4; ++i)
      for (int k = 0; k < 3; ++k) d = std::max(d, std::abs(x[i][k] - x[0][k]));
    return d;
  }
};

Point3 affine(const Point3& base, const Point3& toward, double t) {
  Point3 r{};
  for (int k = 0; k < 3; ++k) r[k] = base[k] + t * (toward[k] - base[k]);
  return r;
}

} // namespace

FitReport fit_sigmoid(std::span<const DataPoint> data) {
  check_samples(data, "fit_sigmoid");

  auto sse = [&](const Point3& p) {
    const NonLinearSigmoid m{std::exp(p[0]), std::exp(p[1]), std::exp(p[2])};
    double s = 0.0;
    for (const auto& d : data) {
      const double r = harvested_power(m, d.p_in) - d.p_out;
      s += r * r;
    }
    return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
  };

  double m0 = 0.0;
  for (const auto& d : data) m0 = std::max(m0, d.p_out);
  if (!(m0 > 0.0)) throw FitError("fit_sigmoid: all output powers are zero");
  double b0 = data.back().p_in;
  for (std::size_t i = 1; i < data.size(); ++i) {
    if (data[i].p_out >= 0.5 * m0) {
      const double t = (0.5 * m0 - data[i - 1].p_out) / (data[i].p_out - data[i - 1].p_out);
      b0 = data[i - 1].p_in + t * (data[i].p_in - data[i - 1].p_in);
      break;
    }
  }
  if (!(b0 > 0.0)) b0 = data[1].p_in;
  const double a0 = 4.0 / b0;

  Point3 start{std::log(m0), std::log(a0), std::log(b0)};
  int iterations = 0;
  bool converged = false;
  Simplex s{};

  // Restarting from the incumbent with a fresh simplex guards against the
  // premature collapse Nelder-Mead is prone to along the a-b ridge.
  double previous_best = std::numeric_limits<double>::infinity();
  double step = 0.5;
  while (iterations < kFitMaxIterations) {
    s.x[0] = start;
    for (int k = 0; k < 3; ++k) {
      s.x[k + 1] = start;
      s.x[k + 1][k] += step;
    }
    for (int i = 0; i < 4; ++i) s.f[i] = sse(s.x[i]);

    bool collapsed = false;
    while (iterations < kFitMaxIterations) {
      s.sort();
      if (s.diameter() < kFitDiameterTol) {
        collapsed = true;
        break;
      }
      ++iterations;
      Point3 centroid{};
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) centroid[k] += s.x[i][k] / 3.0;

      const Point3 xr = affine(centroid, s.x[3], -1.0);
      const double fr = sse(xr);
      if (fr < s.f[0]) {
        const Point3 xe = affine(centroid, s.x[3], -2.0);
        const double fe = sse(xe);
        if (fe < fr) {
          s.x[3] = xe;
          s.f[3] = fe;
        } else {
          s.x[3] = xr;
          s.f[3] = fr;
        }
      } else if (fr < s.f[2]) {
        s.x[3] = xr;
        s.f[3] = fr;
      } else {
        const bool outside = fr < s.f[3];
        const Point3 xc = affine(centroid, outside ? xr : s.x[3], 0.5);
        const double fc = sse(xc);
        if (fc < (outside ? fr : s.f[3])) {
          s.x[3] = xc;
          s.f[3] = fc;
        } else {
          for (int i = 1; i < 4; ++i) {
            s.x[i] = affine(s.x[0], s.x[i], 0.5);
            s.f[i] = sse(s.x[i]);
          }
        }
      }
    }
    s.sort();
    start = s.x[0];
    if (collapsed && !(s.f[0] < previous_best * (1.0 - 1e-10))) {
      converged = true;
      break;
    }
    previous_best = s.f[0];
    step = std::max(1e-3, 0.1 * step);
  }

  const double best = s.f[0];
  if (!std::isfinite(best)) throw FitError("fit_sigmoid: residual is not finite");
  FitReport report;
  report.params = {std::exp(s.x[0][0]), std::exp(s.x[0][1]), std::exp(s.x[0][2])};
  report.rmse = std::sqrt(best / static_cast<double>(data.size()));
  report.iterations = iterations;
  report.converged = converged;
  return report;
}

std::vector<DataPoint> load_samples_uw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file: " + path.string());
  std::vector<DataPoint> out;
  std::string line;
  int line_no = 0;
  bool seen_row = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace_if(line.begin(), line.end(), [](char c) { return c == ',' || c == ';'; }, ' ');
    std::istringstream fields(line);
    double p_in = 0.0, p_out = 0.0;
    if (!(fields >> p_in >> p_out)) {
      if (!seen_row && out.empty()) {
        seen_row = true;  // header
        continue;
      }
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected two numbers");
    }
    seen_row = true;
    out.push_back({p_in * 1e-6, p_out * 1e-6});
  }
  return out;
}

} // namespace wpc::eh
