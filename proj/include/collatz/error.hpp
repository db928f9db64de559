#ifndef COLLATZ_ERROR_HPP
#define COLLATZ_ERROR_HPP

#include <stdexcept>
#include <string>

namespace collatz {

/// Base of every domain failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value left the 128-bit range. Never reported as a wrapped value.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// The step budget ran out before the trajectory reached 1.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

/// Precondition violation (zero input, even input where odd is required, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

/// Malformed memo file: bad magic, version, or truncated payload.
class FormatError : public Error {
 public:
  using Error::Error;
};

class ConventionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace collatz

#endif  // COLLATZ_ERROR_HPP
