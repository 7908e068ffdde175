#pragma once

#include <stdexcept>
#include <string>

namespace apcone {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched matrix sizes or coefficient counts.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Input outside an operation's stated domain (invalid spec, bad parameter).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Iterative solver failed to converge, or a factorization broke down.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace apcone
