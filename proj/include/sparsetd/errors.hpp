#pragma once

#include <stdexcept>
#include <string>

namespace sparsetd {

// Error categories map one-to-one onto the CLI exit codes (2, 3, 4).

/// Malformed or inconsistent input: bad dimensions, invalid parameters,
/// unreadable files.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The regression is not identifiable: p >= n, collinear columns, or a
/// method applied outside its domain.
class IdentifiabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A factorization or iteration failed on otherwise valid input.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sparsetd
