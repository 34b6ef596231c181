#pragma once

#include <stdexcept>
#include <string>

namespace bakerfr {

/// Invalid parameters or inconsistent data supplied to a constructor or builder.
class ConstructionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The operation is not defined for this map (inverse of a non-invertible map,
/// projection of a y-dependent map, ...).
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Two independent routes to the same quantity disagreed.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quantity is undefined for the given parameters (e.g. e_n when <Lambda> = 0).
class UndefinedValue : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace bakerfr
