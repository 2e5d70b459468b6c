#pragma once

#include <stdexcept>
#include <string>

namespace wpc {

/// Argument outside an operation's mathematical domain.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// An iterative engine ran out of budget before meeting its tolerance.
/// The best estimate reached so far is carried along.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double best_estimate, double abs_err)
      : std::runtime_error(what), best_estimate_(best_estimate), abs_err_(abs_err) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double abs_err() const noexcept { return abs_err_; }

private:
  double best_estimate_;
  double abs_err_;
};

/// Successive Richardson extrapolants stopped agreeing.
class InstabilityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Root bracket has no sign change, or could not be grown to one.
class BracketError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A closed-form path was asked for with an energy-harvesting model it
/// was not derived for.
class ModelMismatchError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Alternating series lost too many digits to cancellation.
class PrecisionError : public std::runtime_error {
public:
  PrecisionError(const std::string& what, double cancellation_ratio)
      : std::runtime_error(what), ratio_(cancellation_ratio) {}

  double cancellation_ratio() const noexcept { return ratio_; }

private:
  double ratio_;
};

/// Sigmoid fit could not produce a finite residual.
class FitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A probability left [0,1] by more than rounding can explain.
class ConsistencyError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Malformed scenario file, flag, or data file.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace wpc
