#pragma once

#include <stdexcept>
#include <string>

namespace threebody {

/// Invalid physical or numerical parameters. Maps to CLI exit code 2.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The ground manifold is not separated from the rest of the spectrum.
class GapClosedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace threebody
