#pragma once

#include <stdexcept>
#include <string>

namespace sheafdiff {

/// Shapes or indices that do not agree with the sheaf they are used with.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Missing or unsupported configuration (potentials, neighbor values, config keys).
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Diffusion energy blew up under the chosen step size.
class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A randomized construction gave up; retrying with another seed may succeed.
class RetryableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sheafdiff
