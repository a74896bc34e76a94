#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ks/log_expr.hpp"
#include "ks/quadrature.hpp"

namespace ks {

enum class Support { RealLine, PositiveHalfLine };

std::string to_string(Support s);

enum class FamilyKind { OddNormalPower, AbsNormalPower, Custom };

// Which closed-form family a density belongs to.
//   OddNormalPower(n): law of X^{2n+1}, X ~ N(0, 1/2), on the real line.
//   AbsNormalPower(r): law of |X|^r, X ~ N(0, 1/2), on the half line.
struct Family {
  FamilyKind kind = FamilyKind::Custom;
  double parameter = 0.0;  // n or r

  friend bool operator==(const Family&, const Family&) = default;
};

using RealFn = std::function<double(double)>;

// An immutable probability density on the real line or on (0, inf).
//
// eval() returns 0 outside the support. log_density() prefers the symbolic
// log-density when present (it stays finite where eval() underflows), then a
// user-supplied log callable, then ln(eval(x)).
class Density {
 public:
  Support support() const noexcept { return support_; }
  const Family& family() const noexcept { return family_; }
  const std::optional<LogDensityExpr>& log_expr() const noexcept { return log_expr_; }
  // Even about the origin (real-line densities only).
  bool symmetric() const noexcept { return symmetric_; }

  double eval(double x) const;
  double operator()(double x) const { return eval(x); }
  double log_density(double x) const;

  bool in_support(double x) const {
    return support_ == Support::RealLine || x > 0.0;
  }

 private:
  friend Density make_odd_normal_power(int n);
  friend Density make_abs_normal_power(double r);
  friend Density make_custom(Support, RealFn, std::optional<LogDensityExpr>, bool, RealFn);
  friend Density make_from_log_expr(Support, const LogDensityExpr&);
  friend Density lift_to_real_line(const Density&);
  friend Density make_perturbed(const Density&, RealFn, double, bool);

  Density(Support s, RealFn eval, RealFn log_eval, std::optional<LogDensityExpr> log_expr,
          Family family, bool symmetric);

  Support support_;
  RealFn eval_;
  RealFn log_eval_;  // may be empty
  std::optional<LogDensityExpr> log_expr_;
  Family family_;
  bool symmetric_;
};

// f_n(x) = |x|^{-2n/(2n+1)} exp(-|x|^{2/(2n+1)}) / ((2n+1) sqrt(pi)), n >= 1.
// The density is unbounded at 0; eval(0) returns +inf.
Density make_odd_normal_power(int n);

// f_r(x) = 2/(r sqrt(pi)) x^{1/r - 1} exp(-x^{2/r}) on x > 0, r > 0.
Density make_abs_normal_power(double r);

// Dispatch on a family tag; parameter is n (must be integral) or r.
Density make_family(FamilyKind kind, double parameter);

// A user density. `log_eval` is optional and used for ln f when no
// expression is given. Throws DomainError if eval is negative at a probe
// point or if the total mass differs from 1 by more than 1e-6.
Density make_custom(Support support, RealFn eval, std::optional<LogDensityExpr> log_expr = {},
                    bool symmetric = false, RealFn log_eval = {});

// Density exp(u(x)) for a closed-form log-density u. On the real line the
// result is symmetric because u depends on |x| only.
Density make_from_log_expr(Support support, const LogDensityExpr& u);

// f*(x) = |x| f(x^2): an even density on R whose moments of order 2k are
// the moments of order k of f.
Density lift_to_real_line(const Density& half_line);

// x -> center(x) (1 + eps h(x)) on the support of center. No normalization
// check: callers guarantee |eps h| <= 1 and that h f integrates to 0.
Density make_perturbed(const Density& center, RealFn h, double eps, bool symmetric);

enum class MomentMethod { ClosedForm, Quadrature };

struct MomentSequence {
  std::vector<int> orders;
  std::vector<double> values;
  MomentMethod method = MomentMethod::ClosedForm;
};

// integral x^k f(x) dx. Closed form for family densities, quadrature
// otherwise (AccuracyError if the improper integral does not converge).
double moment(const Density& d, int k);

// integral |x|^k f(x) dx; equals moment() on the half line.
double absolute_moment(const Density& d, int k);

// Quadrature route regardless of family, with the error estimate.
quad::QuadResult moment_by_quadrature(const Density& d, int k, double rel_tol = 1e-11);
quad::QuadResult absolute_moment_by_quadrature(const Density& d, int k, double rel_tol = 1e-11);

MomentSequence moment_sequence(const Density& d, int max_order);

// integral f over the support.
quad::QuadResult total_mass(const Density& d, double rel_tol = 1e-11);

}  // namespace ks
