#pragma once

#include <stdexcept>
#include <string>

namespace occtp {

// Input that violates an operation contract. CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally valid request that this implementation refuses to run
// (size guards, cache limits). CLI maps this to exit code 2.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// A model without a usable tail (zero split mass) or an estimate whose
// normalization collapsed. Treated as a validation failure by the CLI.
class DegenerateError : public ValidationError {
 public:
  explicit DegenerateError(const std::string& what) : ValidationError(what) {}
};

}  // namespace occtp
