#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bhmf {

/// Invalid or inconsistent run configuration (maps to exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A run was rejected because it would exceed the memory budget
/// (maps to exit code 3). Carries the estimate that triggered the rejection.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(double required_bytes, double available_bytes, const std::string& what)
      : std::runtime_error(what),
        required_bytes(required_bytes),
        available_bytes(available_bytes) {}

  double required_bytes;
  double available_bytes;
};

/// Numerical breakdown: non-finite amplitudes, eigensolver failure,
/// integrator drift past its hard limit (maps to exit code 4).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bhmf
