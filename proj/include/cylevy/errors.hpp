#pragma once

#include <stdexcept>
#include <string>

namespace cylevy {

/// Malformed or unsupported input (bad parameters, unknown ids, parse errors).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inputs are well formed but violate a standing assumption of the theory
/// (infinite moments, failed Lipschitz/growth bounds, missing mean, ...).
class AssumptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A decision rule tried to read history beyond its anchor time.
class MeasurabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Iteration failed to contract.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double measured_ratio)
      : std::runtime_error(what), measured_ratio_(measured_ratio) {}
  double measured_ratio() const { return measured_ratio_; }

 private:
  double measured_ratio_;
};

}  // namespace cylevy
