#pragma once

#include <stdexcept>
#include <string>

namespace enprof {

/// Malformed or inconsistent input: bad documents, bad headers, bad dimensions.
/// Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numeric failure on otherwise well-formed input: integer overflow, singular
/// fits, windows outside a trace span. Maps to CLI exit code 2.
class ComputeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace enprof
