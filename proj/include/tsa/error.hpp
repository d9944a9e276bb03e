#pragma once

#include <stdexcept>
#include <string>

namespace tsa {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative or quadrature routine did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double achieved_error)
      : std::runtime_error(what), achieved_error_(achieved_error) {}
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// A result or intermediate quantity is outside the representable range.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

}  // namespace tsa
