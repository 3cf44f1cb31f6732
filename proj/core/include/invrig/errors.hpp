#pragma once

#include <stdexcept>
#include <string>

namespace invrig {

/// Raised when a caller violates a documented precondition (dimension
/// mismatch, index out of range, infeasible configuration).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for malformed or inconsistent input files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace invrig
