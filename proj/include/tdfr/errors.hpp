#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tdfr {

/// Invalid operator data (non-finite, wrong shape, not Hermitian, ...).
class ConstructionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Precondition violated by a function argument.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dilation factor left the regime where the Newtonian-limit expansion holds.
class WeakFieldError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Aggregated scenario validation failures; each entry is "field.path: reason".
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> issues);

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tdfr
