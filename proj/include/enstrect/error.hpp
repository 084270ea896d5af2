#pragma once

#include <stdexcept>
#include <string>

namespace enstrect {

// Raised when inputs violate a documented precondition or file contract.
// Maps to exit/status code 1 at the CLI and C API boundary.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a computation fails on structurally valid inputs
// (solver breakdown, degenerate geometry discovered mid-stage).
// Maps to exit/status code 2.
class ProcessingError : public std::runtime_error {
 public:
  explicit ProcessingError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace enstrect
