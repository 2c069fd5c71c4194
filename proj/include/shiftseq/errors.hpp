#pragma once

#include <stdexcept>
#include <string>

namespace shiftseq {

// Bad caller input: out-of-range indices, dimension mismatches, malformed
// files or configs. The CLI maps this family to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

class IoError : public InputError {
 public:
  using InputError::InputError;
};

// Numerical failure inside a solver. Exit code 1.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Normal system has no usable unregularized solution; callers may retry
// with a ridge term.
class SingularSystemError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace shiftseq
