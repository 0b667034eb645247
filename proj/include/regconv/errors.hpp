#pragma once

#include <stdexcept>
#include <string>

namespace regconv {

/// Allocation would exceed the configured cell budget.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// An integrand or term source produced a non-finite value; the message
/// carries the offending point.
class EvalError : public std::runtime_error {
 public:
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace regconv
