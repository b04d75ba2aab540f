#pragma once

#include <stdexcept>
#include <string>

namespace btl {

// Malformed group data, mismatched models or invalid normal forms.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Input values outside their admissible range.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested operation is not available for this model.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A hypothesis of the operation is not met (for example a missing delta bound).
class InapplicableError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Enumeration or window size exceeds the configured budget.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, int attainable_radius)
      : std::runtime_error(what), attainable_radius_(attainable_radius) {}
  int attainable_radius() const noexcept { return attainable_radius_; }

 private:
  int attainable_radius_;
};

}  // namespace btl
