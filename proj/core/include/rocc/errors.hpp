#pragma once

#include <stdexcept>
#include <string>

namespace rocc {

// Shape or extent disagreement between operands.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// NaN/Inf reached a point where only finite values are allowed.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// API called in a state that does not support it (step after done,
// backward on an empty tape, sampling an empty buffer, ...).
class UsageError : public std::logic_error {
 public:
  explicit UsageError(const std::string& what) : std::logic_error(what) {}
};

// Malformed aggregate: episode arrays with inconsistent lengths,
// parameter sets whose entries do not line up, bad file contents.
class StructuralError : public std::runtime_error {
 public:
  explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rocc
