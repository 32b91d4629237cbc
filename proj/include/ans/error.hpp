#pragma once

#include <stdexcept>
#include <string>

namespace ans {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A state left the 64-bit machine bound.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Malformed or corrupted encoded data.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// The decoder asked for more digits than the stream holds.
class DigitUnderflow : public FormatError {
 public:
  using FormatError::FormatError;
};

/// An enumeration would exceed its configured work budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace ans
