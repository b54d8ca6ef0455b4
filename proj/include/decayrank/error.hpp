#pragma once

#include <stdexcept>
#include <string>

namespace decayrank {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the documented domain of an operation.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Malformed or version-mismatched serialized state. `field()` names the
/// first field that failed to decode.
class FormatError : public Error {
 public:
  FormatError(std::string field, const std::string& what)
      : Error("format error in field '" + field + "': " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Exact enumeration refused because the path count exceeds the budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace decayrank
