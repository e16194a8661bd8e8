#pragma once

#include <stdexcept>
#include <string>

namespace fpp {

/// Bad input: arguments, files, or configuration that violate a precondition.
/// The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure while doing otherwise valid work (divergence, I/O after validation).
/// The CLI maps this to exit code 2.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fpp
