#pragma once

#include <stdexcept>
#include <string>

namespace ks {

// Argument outside the mathematical domain of an operation (bad support,
// parameter out of range, evaluation point on a boundary).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A quadrature did not reach its target accuracy. The best estimate is kept
// so callers can still report it.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double best_estimate, double error_estimate)
      : std::runtime_error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

// A required hypothesis does not hold (e.g. the logarithmic integral diverges).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A symbolic rule does not cover a term; callers fall back to quadrature.
class UnsupportedTerm : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ks
