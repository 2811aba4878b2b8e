#pragma once

#include <stdexcept>
#include <string>

namespace roughspec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (maps to CLI exit code 2).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed or produced an inconsistent result (exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace roughspec
