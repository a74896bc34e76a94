#include "ks/log_expr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ks/errors.hpp"

namespace ks {

LogDensityExpr::LogDensityExpr(double constant, double log_coeff, std::vector<PowerTerm> powers)
    : constant_(constant), log_coeff_(log_coeff), powers_(std::move(powers)) {
  if (!std::isfinite(constant_) || !std::isfinite(log_coeff_)) {
    throw DomainError("log-density coefficients must be finite");
  }
  for (const auto& p : powers_) {
    if (!std::isfinite(p.coeff) || !std::isfinite(p.exponent)) {
      throw DomainError("power term coefficients and exponents must be finite");
    }
  }
  normalize();
}

void LogDensityExpr::normalize() {
  std::vector<PowerTerm> merged;
  std::stable_sort(powers_.begin(), powers_.end(),
                   [](const PowerTerm& a, const PowerTerm& b) { return a.exponent < b.exponent; });
  for (const auto& p : powers_) {
    if (p.exponent == 0.0) {
      constant_ += p.coeff;
      continue;
    }
    if (!merged.empty() && merged.back().exponent == p.exponent) {
      merged.back().coeff += p.coeff;
    } else {
      merged.push_back(p);
    }
  }
  std::erase_if(merged, [](const PowerTerm& p) { return p.coeff == 0.0; });
  powers_ = std::move(merged);
}

double LogDensityExpr::operator()(double x) const {
  const double ax = std::abs(x);
  double v = constant_;
  if (log_coeff_ != 0.0) v += log_coeff_ * std::log(ax);
  for (const auto& p : powers_) {
    v += p.coeff * std::pow(ax, p.exponent);
  }
  if (std::isnan(v)) {
    // Only reachable at x = 0 with opposite infinities; the density is then
    // either 0 or unbounded there and the point carries no mass.
    return -std::numeric_limits<double>::infinity();
  }
  return v;
}

LogDensityExpr LogDensityExpr::lifted() const {
  LogDensityExpr out = squared_argument();
  out.log_coeff_ += 1.0;
  return out;
}

LogDensityExpr LogDensityExpr::squared_argument() const {
  std::vector<PowerTerm> doubled;
  doubled.reserve(powers_.size());
  for (const auto& p : powers_) doubled.push_back({p.coeff, 2.0 * p.exponent});
  return LogDensityExpr(constant_, 2.0 * log_coeff_, std::move(doubled));
}

LogDensityExpr& LogDensityExpr::operator+=(const LogDensityExpr& rhs) {
  constant_ += rhs.constant_;
  log_coeff_ += rhs.log_coeff_;
  powers_.insert(powers_.end(), rhs.powers_.begin(), rhs.powers_.end());
  normalize();
  return *this;
}

LogDensityExpr& LogDensityExpr::operator*=(double s) {
  constant_ *= s;
  log_coeff_ *= s;
  for (auto& p : powers_) p.coeff *= s;
  normalize();
  return *this;
}

}  // namespace ks
