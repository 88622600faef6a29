#pragma once

#include <stdexcept>
#include <string>

namespace nildual {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-range input (bad algebra file, bad arguments).
class InputError : public Error {
 public:
  using Error::Error;
};

// A documented precondition does not hold for the given input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A closure or enumeration exceeded its configured budget. Results are
// never silently truncated; callers either catch this or report
// "inconclusive".
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// A self-check on a constructed object failed.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace nildual
