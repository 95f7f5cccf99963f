#pragma once

#include <stdexcept>
#include <string>

namespace cqnc {

// Malformed or incomplete configuration text.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Physically invalid parameter values.
class ParameterError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Unstable steady states, singular solves, non-finite trajectories.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace cqnc
