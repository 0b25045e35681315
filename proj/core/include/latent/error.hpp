#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace latent {

/// Shapes or sizes of the inputs do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A precondition on a value (not a shape) was violated.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A file or document could not be parsed, or has the wrong magic/version.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values appeared in a computation.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, long iteration = -1)
      : std::runtime_error(what), iteration_(iteration) {}

  /// Optimizer iteration at which the failure was detected, or -1.
  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace latent
