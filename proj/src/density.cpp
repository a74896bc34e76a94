#include "ks/density.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ks/errors.hpp"

namespace ks {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrtPi = std::sqrt(std::numbers::pi);

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// E|X|^p for X ~ N(0, 1/2).
double half_normal_abs_moment(double p) { return std::tgamma(0.5 * (p + 1.0)) / kSqrtPi; }

}  // namespace

std::string to_string(Support s) {
  return s == Support::RealLine ? "real" : "positive";
}

Density::Density(Support s, RealFn eval, RealFn log_eval, std::optional<LogDensityExpr> log_expr,
                 Family family, bool symmetric)
    : support_(s),
      eval_(std::move(eval)),
      log_eval_(std::move(log_eval)),
      log_expr_(std::move(log_expr)),
      family_(family),
      symmetric_(s == Support::RealLine && symmetric) {}

double Density::eval(double x) const {
  if (!in_support(x)) return 0.0;
  return eval_(x);
}

double Density::log_density(double x) const {
  if (!in_support(x)) return -kInf;
  if (log_expr_) return (*log_expr_)(x);
  if (log_eval_) return log_eval_(x);
  return std::log(eval_(x));
}

Density make_odd_normal_power(int n) {
  if (n < 1) throw DomainError("OddNormalPower requires n >= 1");
  const double m = 2.0 * n + 1.0;
  const double norm = 1.0 / (m * kSqrtPi);
  const double sing = -2.0 * n / m;
  const double decay = 2.0 / m;
  auto eval = [norm, sing, decay](double x) {
    const double ax = std::abs(x);
    if (ax == 0.0) return kInf;
    return norm * std::pow(ax, sing) * std::exp(-std::pow(ax, decay));
  };
  LogDensityExpr u(-std::log(m * kSqrtPi), sing, {{-1.0, decay}});
  return Density(Support::RealLine, eval, {}, std::move(u),
                 Family{FamilyKind::OddNormalPower, static_cast<double>(n)}, true);
}

Density make_abs_normal_power(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("AbsNormalPower requires r > 0");
  const double norm = 2.0 / (r * kSqrtPi);
  const double sing = 1.0 / r - 1.0;
  const double decay = 2.0 / r;
  auto eval = [norm, sing, decay](double x) {
    if (x == 0.0) return sing < 0.0 ? kInf : (sing == 0.0 ? norm : 0.0);
    return norm * std::pow(x, sing) * std::exp(-std::pow(x, decay));
  };
  LogDensityExpr u(std::log(norm), sing, {{-1.0, decay}});
  return Density(Support::PositiveHalfLine, eval, {}, std::move(u),
                 Family{FamilyKind::AbsNormalPower, r}, false);
}

Density make_family(FamilyKind kind, double parameter) {
  switch (kind) {
    case FamilyKind::OddNormalPower:
      if (parameter != std::floor(parameter)) throw DomainError("OddNormalPower requires integer n");
      return make_odd_normal_power(static_cast<int>(parameter));
    case FamilyKind::AbsNormalPower:
      return make_abs_normal_power(parameter);
    case FamilyKind::Custom:
      break;
  }
  throw DomainError("make_family needs a closed-form family");
}

Density make_custom(Support support, RealFn eval, std::optional<LogDensityExpr> log_expr,
                    bool symmetric, RealFn log_eval) {
  if (!eval) throw DomainError("custom density needs an evaluation callable");
  Density d(support, std::move(eval), std::move(log_eval), std::move(log_expr),
            Family{FamilyKind::Custom, 0.0}, symmetric);

  for (double x : {-3.0, -1.0, -0.5, 0.5, 1.0, 3.0}) {
    const double v = d.eval(x);
    if (v < 0.0 || std::isnan(v)) {
      std::ostringstream os;
      os << "custom density is negative or NaN at x = " << x;
      throw DomainError(os.str());
    }
  }
  const quad::QuadResult mass = total_mass(d, 1e-10);
  if (!mass.converged || std::abs(mass.value - 1.0) > 1e-6) {
    std::ostringstream os;
    os.precision(17);
    os << "custom density does not integrate to 1 (" << quad::describe(mass) << ")";
    throw DomainError(os.str());
  }
  return d;
}

Density make_from_log_expr(Support support, const LogDensityExpr& u) {
  auto eval = [u](double x) { return std::exp(u(x)); };
  return make_custom(support, eval, u, support == Support::RealLine);
}

Density lift_to_real_line(const Density& f) {
  if (f.support() != Support::PositiveHalfLine) {
    throw DomainError("lift_to_real_line needs a density on the positive half line");
  }
  std::optional<LogDensityExpr> lifted;
  if (f.log_expr()) lifted = f.log_expr()->lifted();

  auto eval = [f, lifted](double x) {
    const double ax = std::abs(x);
    if (ax == 0.0) return lifted ? std::exp((*lifted)(0.0)) : 0.0;
    return ax * f.eval(ax * ax);
  };
  auto log_eval = [f](double x) {
    const double ax = std::abs(x);
    return std::log(ax) + f.log_density(ax * ax);
  };
  return Density(Support::RealLine, eval, log_eval, lifted, Family{FamilyKind::Custom, 0.0}, true);
}

Density make_perturbed(const Density& center, RealFn h, double eps, bool symmetric) {
  if (!h) throw DomainError("perturbation callable is empty");
  auto eval = [center, h, eps](double x) {
    const double fx = center.eval(x);
    if (fx == 0.0) return 0.0;
    return fx * (1.0 + eps * h(x));
  };
  auto log_eval = [center, h, eps](double x) {
    return center.log_density(x) + std::log1p(eps * h(x));
  };
  return Density(center.support(), eval, log_eval, std::nullopt, Family{FamilyKind::Custom, 0.0},
                 symmetric);
}

quad::QuadResult moment_by_quadrature(const Density& d, int k, double rel_tol) {
  if (k < 0) throw DomainError("moment order must be nonnegative");
  auto integrand = [&d, k](double x) {
    const double fx = d.eval(x);
    if (fx == 0.0) return 0.0;
    return ipow(x, k) * fx;
  };
  const auto domain =
      d.support() == Support::RealLine ? quad::Domain::RealLine : quad::Domain::HalfLine;
  return quad::integrate_improper(integrand, domain, {rel_tol, std::nullopt});
}

quad::QuadResult absolute_moment_by_quadrature(const Density& d, int k, double rel_tol) {
  if (k < 0) throw DomainError("moment order must be nonnegative");
  auto integrand = [&d, k](double x) {
    const double fx = d.eval(x);
    if (fx == 0.0) return 0.0;
    return ipow(std::abs(x), k) * fx;
  };
  const auto domain =
      d.support() == Support::RealLine ? quad::Domain::RealLine : quad::Domain::HalfLine;
  return quad::integrate_improper(integrand, domain, {rel_tol, std::nullopt});
}

namespace {

double require_converged(const quad::QuadResult& r, int k) {
  if (!r.converged) {
    std::ostringstream os;
    os << "moment of order " << k << " did not converge: " << quad::describe(r);
    throw AccuracyError(os.str(), r.value, r.abs_error);
  }
  return r.value;
}

}  // namespace

double moment(const Density& d, int k) {
  if (k < 0) throw DomainError("moment order must be nonnegative");
  const Family& fam = d.family();
  switch (fam.kind) {
    case FamilyKind::AbsNormalPower:
      return half_normal_abs_moment(fam.parameter * k);
    case FamilyKind::OddNormalPower:
      if (k % 2 == 1) return 0.0;
      return half_normal_abs_moment((2.0 * fam.parameter + 1.0) * k);
    case FamilyKind::Custom:
      break;
  }
  return require_converged(moment_by_quadrature(d, k), k);
}

double absolute_moment(const Density& d, int k) {
  if (k < 0) throw DomainError("moment order must be nonnegative");
  const Family& fam = d.family();
  switch (fam.kind) {
    case FamilyKind::AbsNormalPower:
      return half_normal_abs_moment(fam.parameter * k);
    case FamilyKind::OddNormalPower:
      return half_normal_abs_moment((2.0 * fam.parameter + 1.0) * k);
    case FamilyKind::Custom:
      break;
  }
  return require_converged(absolute_moment_by_quadrature(d, k), k);
}

MomentSequence moment_sequence(const Density& d, int max_order) {
  if (max_order < 0) throw DomainError("moment order must be nonnegative");
  MomentSequence seq;
  seq.method = d.family().kind == FamilyKind::Custom ? MomentMethod::Quadrature
                                                      : MomentMethod::ClosedForm;
  for (int k = 0; k <= max_order; ++k) {
    seq.orders.push_back(k);
    seq.values.push_back(moment(d, k));
  }
  return seq;
}

quad::QuadResult total_mass(const Density& d, double rel_tol) {
  return moment_by_quadrature(d, 0, rel_tol);
}

}  // namespace ks
