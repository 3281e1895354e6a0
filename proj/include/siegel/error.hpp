#pragma once

#include <stdexcept>
#include <string>

namespace siegel {

// Invalid input or configuration. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation could not be completed (quadrature or series failure,
// capacity exceeded at run time). Maps to CLI exit code 3.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace siegel
