#pragma once

#include <filesystem>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

// RF-to-DC transfer functions. All powers are in watts.

namespace wpc::eh {

/// P_EH = M (1 - e^{-a P_R}) / (1 + e^{-a (P_R - b)}).
struct NonLinearSigmoid {
  double max_power = 0.0;  ///< M, saturation level [W]
  double a = 0.0;          ///< steepness [1/W]
  double b = 0.0;          ///< turn-on point [W]
};

/// Unbounded linear conversion, zero sensitivity.
struct Linear {
  double eta = 1.0;
};

/// min(eta * P_R, M).
struct PiecewiseLinear {
  double eta = 1.0;
  double max_power = 0.0;
};

struct DataPoint {
  double p_in = 0.0;   ///< [W]
  double p_out = 0.0;  ///< [W]
};

/// Natural cubic spline through measured (p_in, p_out) samples. Between the
/// origin and the first sample the output ramps linearly from zero; beyond
/// the last sample it holds the last output.
class Tabulated {
public:
  explicit Tabulated(std::vector<DataPoint> samples);

  double operator()(double p_in) const;
  std::span<const DataPoint> samples() const { return samples_; }

private:
  std::vector<DataPoint> samples_;
  std::vector<double> second_;  // spline second derivatives at the knots
};

using EhModel = std::variant<NonLinearSigmoid, Linear, PiecewiseLinear, Tabulated>;

void validate(const NonLinearSigmoid& m);

double harvested_power(const NonLinearSigmoid& m, double p_r);
double harvested_power(const EhModel& model, double p_r);

/// Largest slope dP_EH/dP_R of the sigmoid, reached at P_R = b.
double max_slope(const NonLinearSigmoid& m);

std::string_view model_name(const EhModel& model);

struct FitReport {
  NonLinearSigmoid params;
  double rmse = 0.0;  ///< [W]
  int iterations = 0;
  bool converged = false;
};

/// Least-squares fit of the sigmoid by Nelder-Mead on (ln M, ln a, ln b).
/// Needs >= 4 points with strictly increasing p_in and non-negative p_out.
FitReport fit_sigmoid(std::span<const DataPoint> data);

/// Reads a two-column text file of (p_in, p_out) in microwatts. Columns may
/// be separated by commas, semicolons or whitespace; lines starting with '#'
/// are comments and a non-numeric first line is taken as a header.
std::vector<DataPoint> load_samples_uw(const std::filesystem::path& path);

} // namespace wpc::eh
