#pragma once

#include <vector>

namespace ks {

// coeff * |x|^exponent
struct PowerTerm {
  double coeff = 0.0;
  double exponent = 0.0;

  friend bool operator==(const PowerTerm&, const PowerTerm&) = default;
};

// Closed-form log-density
//
//   ln f(x) = constant + log_coeff * ln|x| + sum_i coeff_i * |x|^exponent_i
//
// Power terms are kept sorted by exponent with distinct, nonzero exponents.
// A zero exponent is folded into the constant, repeated exponents are merged
// and terms whose coefficient cancels to zero are dropped.
class LogDensityExpr {
 public:
  LogDensityExpr() = default;
  LogDensityExpr(double constant, double log_coeff, std::vector<PowerTerm> powers);

  double constant() const noexcept { return constant_; }
  double log_coeff() const noexcept { return log_coeff_; }
  const std::vector<PowerTerm>& powers() const noexcept { return powers_; }

  // Value at x. At x = 0 the log and negative-power terms diverge; the
  // result is then +-inf (never NaN).
  double operator()(double x) const;

  // ln g(x) with g(x) = |x| f(x^2): exponents doubled, log_coeff -> 1 + 2a.
  LogDensityExpr lifted() const;

  // u(x) -> u(x^2): exponents doubled, log_coeff doubled.
  LogDensityExpr squared_argument() const;

  LogDensityExpr& operator+=(const LogDensityExpr& rhs);
  LogDensityExpr& operator*=(double s);
  friend LogDensityExpr operator+(LogDensityExpr a, const LogDensityExpr& b) { return a += b; }
  friend LogDensityExpr operator*(double s, LogDensityExpr a) { return a *= s; }

  friend bool operator==(const LogDensityExpr&, const LogDensityExpr&) = default;

 private:
  void normalize();

  double constant_ = 0.0;
  double log_coeff_ = 0.0;
  std::vector<PowerTerm> powers_;
};

}  // namespace ks
