// SPDX-License-Identifier: Apache-2.0

#ifndef ONEBIT_ERRORS_HPP
#define ONEBIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace onebit {

/// Raised when inputs violate a documented precondition or have mismatched dimensions.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a linear system is rank deficient or an information matrix is singular.
class SingularError : public std::runtime_error {
public:
  SingularError(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}

  double condition() const noexcept { return condition_; }

private:
  double condition_;
};

/// Raised when a numerical result is not finite (NaN/Inf).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace onebit

#endif
