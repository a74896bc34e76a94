#include "ks/krein.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ks/errors.hpp"

namespace ks {

namespace {

constexpr double kTol = 1e-10;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// -ln f(x) / (1 + x^2) on [0, inf), with the real line folded in.
using LogFn = std::function<double(double)>;

double weighted(const LogFn& log_f, double x) {
  // Past 1e150 the weight is below 1e-300 and any log-density a finite
  // integral allows contributes nothing; evaluating f there only underflows.
  if (std::abs(x) > 1e150) return 0.0;
  const double l = log_f(x);
  if (std::isnan(l) || l == -std::numeric_limits<double>::infinity()) {
    throw DomainError("density vanishes (or underflows) at sampled point x = " + fmt(x) +
                      "; supply a log-density to avoid underflow");
  }
  return -l / (1.0 + x * x);
}

struct Problem {
  quad::Integrand integrand;  // over [0, inf)
  std::string symbolic_note;
  bool symbolic_divergent = false;
};

KreinVerdict decide(const Problem& prob, bool symbolic) {
  KreinVerdict v;
  v.method = symbolic ? KreinMethod::Symbolic : KreinMethod::Numeric;

  if (symbolic && prob.symbolic_divergent) {
    v.status = KreinStatus::Divergent;
    v.diagnostics = prob.symbolic_note + "\n" + cutoff_growth_table(prob.integrand);
    return v;
  }

  const quad::QuadResult r = quad::integrate_from(prob.integrand, 0.0, {kTol, std::nullopt});
  v.error_estimate = r.abs_error;
  std::string note = symbolic ? prob.symbolic_note + "\n" : std::string{};
  if (r.converged) {
    v.status = KreinStatus::Finite;
    v.value = r.value;
    v.diagnostics = note + "quadrature: " + quad::describe(r);
  } else if (r.diverged && !symbolic) {
    v.status = KreinStatus::Divergent;
    v.diagnostics = "quadrature: " + quad::describe(r) + "\n" + cutoff_growth_table(prob.integrand);
  } else {
    v.status = KreinStatus::Inconclusive;
    v.diagnostics =
        note + "quadrature: " + quad::describe(r) + "\n" + cutoff_growth_table(prob.integrand);
  }
  return v;
}

// Exponent test on u(x) or u(x^2). Divergent tails: a power at least 1 in x
// grows too fast at infinity; a power at most -1 is not integrable at 0.
void symbolic_test(const LogDensityExpr& u, double scale, Problem& prob) {
  std::ostringstream os;
  os.precision(17);
  os << "tail exponents:";
  if (u.powers().empty()) os << " none";
  for (const auto& pt : u.powers()) {
    const double e = scale * pt.exponent;
    os << ' ' << e;
    if (!(e < 1.0) || !(e > -1.0)) prob.symbolic_divergent = true;
  }
  os << (prob.symbolic_divergent ? " (some exponent outside (-1, 1))" : " (all inside (-1, 1))");
  prob.symbolic_note = os.str();
}

bool use_symbolic(const Density& f, KreinMethod method) {
  if (method == KreinMethod::Symbolic && !f.log_expr()) {
    throw DomainError("symbolic Krein check needs a closed-form log-density");
  }
  return method != KreinMethod::Numeric && f.log_expr().has_value();
}

}  // namespace

std::string to_string(KreinStatus s) {
  switch (s) {
    case KreinStatus::Finite:
      return "Finite";
    case KreinStatus::Divergent:
      return "Divergent";
    case KreinStatus::Inconclusive:
      break;
  }
  return "Inconclusive";
}

std::string cutoff_growth_table(const quad::Integrand& g, int levels) {
  auto abs_g = [&g](double x) { return std::abs(g(x)); };
  std::ostringstream os;
  os.precision(10);
  os << "cutoff growth (X, integral_0^X |g|):";
  double acc = quad::integrate_endpoint_singular(abs_g, 0.0, 1.0, 1e-8).value;
  os << "\n  1 " << acc;
  double x = 1.0;
  for (int j = 1; j <= levels; ++j) {
    acc += quad::integrate(abs_g, x, 2.0 * x, 1e-8).value;
    x *= 2.0;
    os << "\n  " << x << ' ' << acc;
  }
  return os.str();
}

KreinVerdict krein_check_real(const Density& f, KreinMethod method) {
  if (f.support() != Support::RealLine) {
    throw DomainError("krein_check_real needs a density on the real line");
  }
  const bool symbolic = use_symbolic(f, method);
  Problem prob;
  if (symbolic) {
    const LogDensityExpr u = *f.log_expr();
    symbolic_test(u, 1.0, prob);
    // u depends on |x| only.
    prob.integrand = [u](double x) { return 2.0 * weighted([&u](double y) { return u(y); }, x); };
  } else {
    prob.integrand = [f](double x) {
      auto lf = [&f](double y) { return f.log_density(y); };
      return weighted(lf, x) + weighted(lf, -x);
    };
  }
  return decide(prob, symbolic);
}

KreinVerdict krein_check_halfline(const Density& f, KreinMethod method) {
  if (f.support() != Support::PositiveHalfLine) {
    throw DomainError("krein_check_halfline needs a density on the positive half line");
  }
  const bool symbolic = use_symbolic(f, method);
  // x^2 is clamped so the log stays finite where it underflows.
  auto square = [](double x) { return std::max(x * x, std::numeric_limits<double>::min()); };
  Problem prob;
  if (symbolic) {
    const LogDensityExpr u = *f.log_expr();
    symbolic_test(u, 2.0, prob);
    prob.integrand = [u, square](double x) {
      return weighted([&](double y) { return u(square(y)); }, x);
    };
  } else {
    prob.integrand = [f, square](double x) {
      return weighted([&](double y) { return f.log_density(square(y)); }, x);
    };
  }
  return decide(prob, symbolic);
}

}  // namespace ks
