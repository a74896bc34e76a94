#include "ks/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ks/errors.hpp"

namespace ks {

namespace {

using std::numbers::pi;
using quad::QuadResult;

double sgn(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

void merge_term(std::vector<HilbertTerm>& terms, const HilbertTerm& term) {
  for (auto& existing : terms) {
    if (existing.exponent == term.exponent && existing.parity == term.parity) {
      existing.coeff += term.coeff;
      return;
    }
  }
  terms.push_back(term);
}

void tidy(HilbertExpr& e) {
  std::erase_if(e.terms, [](const HilbertTerm& h) { return h.coeff == 0.0; });
  std::sort(e.terms.begin(), e.terms.end(), [](const HilbertTerm& a, const HilbertTerm& b) {
    if (a.exponent != b.exponent) return a.exponent < b.exponent;
    return a.parity < b.parity;
  });
}

std::string exponent_message(double mu, const char* range) {
  std::ostringstream os;
  os.precision(17);
  os << "no symbolic rule for exponent " << mu << " (needs " << range << ")";
  return os.str();
}

QuadResult require(const QuadResult& r, const char* what, double t) {
  if (r.diverged || !r.converged) {
    std::ostringstream os;
    os.precision(17);
    os << what << " at t = " << t << " did not converge: " << quad::describe(r);
    throw AccuracyError(os.str(), r.value, r.abs_error);
  }
  return r;
}

// integral over [lo, inf) of k, split at the tail cutoff.
QuadResult right_tail(const quad::Integrand& k, double lo, const quad::PVParams& p) {
  QuadResult r = quad::integrate(k, lo, p.tail_cutoff, p.target_rel_tol, p.panel_order);
  r += quad::integrate_from(k, p.tail_cutoff, {p.target_rel_tol, std::nullopt});
  return r;
}

// (2t/pi) PV integral_0^inf u(x) / (t^2 - x^2) dx for t > 0.
QuadResult even_positive(const std::function<double(double)>& u, double t,
                         const quad::PVParams& p) {
  auto near = [&u, t](double x) { return u(x) / (t + x); };
  QuadResult r = quad::pv_integrate(near, t, {0.0, 2.0 * t}, p);
  // Divide twice: (t - x)(t + x) overflows long before either factor does.
  auto far = [&u, t](double x) { return u(x) / (t - x) / (t + x); };
  r += right_tail(far, 2.0 * t, p);
  return scaled(require(r, "even-kernel transform", t), 2.0 * t / pi);
}

// General kernel for t > 0; 1/(t-x) + x/(1+x^2) = (1 + t x) / ((t - x)(1 + x^2)).
QuadResult general_positive(const std::function<double(double)>& u, double t,
                            const quad::PVParams& p) {
  auto numer = [&u, t](double x) {
    const double ux = u(x);
    if (ux == 0.0) return 0.0;
    return ux * ((1.0 + t * x) / (1.0 + x * x));
  };
  QuadResult r = quad::pv_integrate(numer, t, {0.0, 2.0 * t}, p);
  auto kernel = [&numer, t](double x) {
    const double n = numer(x);
    return n == 0.0 ? 0.0 : n / (t - x);
  };
  r += right_tail(kernel, 2.0 * t, p);
  auto mirrored = [&kernel](double y) { return kernel(-y); };
  r += quad::integrate_from(mirrored, 0.0, {p.target_rel_tol, std::nullopt});
  return scaled(require(r, "transform", t), 1.0 / pi);
}

QuadResult general_at_zero(const std::function<double(double)>& u, const quad::PVParams& p) {
  auto numer = [&u](double x) {
    const double ux = u(x);
    return ux == 0.0 ? 0.0 : ux / (1.0 + x * x);
  };
  QuadResult r = quad::pv_integrate(numer, 0.0, {-1.0, 1.0}, p);
  auto kernel = [&numer](double x) {
    const double n = numer(x);
    return n == 0.0 ? 0.0 : -n / x;
  };
  // Both tails through x -> |x|: integral_1^inf (k(x) + k(-x)) dx.
  auto folded = [&kernel](double x) { return kernel(x) + kernel(-x); };
  r += quad::integrate_from(folded, 1.0, {p.target_rel_tol, std::nullopt});
  return scaled(require(r, "transform", 0.0), 1.0 / pi);
}

}  // namespace

double HilbertExpr::operator()(double t) const {
  const double s = sgn(t);
  const double at = std::abs(t);
  double v = constant + sgn_coeff * s;
  for (const auto& term : terms) {
    if (term.parity == Parity::OddViaSgn) {
      if (s != 0.0) v += term.coeff * s * std::pow(at, term.exponent);
    } else {
      v += term.coeff * std::pow(at, term.exponent);
    }
  }
  return v;
}

HilbertExpr& HilbertExpr::operator+=(const HilbertExpr& rhs) {
  constant += rhs.constant;
  sgn_coeff += rhs.sgn_coeff;
  for (const auto& term : rhs.terms) merge_term(terms, term);
  tidy(*this);
  return *this;
}

HilbertExpr& HilbertExpr::operator*=(double s) {
  constant *= s;
  sgn_coeff *= s;
  for (auto& term : terms) term.coeff *= s;
  tidy(*this);
  return *this;
}

HilbertExpr hilbert_symbolic(const LogDensityExpr& u) {
  HilbertExpr out;
  out.sgn_coeff = -0.5 * pi * u.log_coeff();
  for (const auto& pt : u.powers()) {
    const double mu = pt.exponent;
    if (!(std::abs(mu) < 1.0)) throw UnsupportedTerm(exponent_message(mu, "0 < |mu| < 1"));
    merge_term(out.terms, {-pt.coeff * std::tan(0.5 * mu * pi), mu, Parity::OddViaSgn});
  }
  tidy(out);
  return out;
}

HilbertExpr hilbert_e_symbolic(const LogDensityExpr& u) {
  HilbertExpr out;
  out.constant = -pi * u.log_coeff();
  for (const auto& pt : u.powers()) {
    const double mu = pt.exponent;
    if (!(std::abs(2.0 * mu) < 1.0)) throw UnsupportedTerm(exponent_message(mu, "0 < |2 mu| < 1"));
    merge_term(out.terms, {-pt.coeff * std::tan(mu * pi), mu, Parity::Even});
  }
  tidy(out);
  return out;
}

QuadResult log_integrability(const std::function<double(double)>& u, bool even) {
  auto g = [&u](double x) {
    const double ux = u(x);
    return ux == 0.0 ? 0.0 : std::abs(ux) / (1.0 + x * x);
  };
  if (even) return scaled(quad::integrate_improper(g, quad::Domain::HalfLine), 2.0);
  return quad::integrate_improper(g, quad::Domain::RealLine);
}

namespace {

void check_integrable(const std::function<double(double)>& u, bool even) {
  const QuadResult r = log_integrability(u, even);
  if (r.diverged || !std::isfinite(r.value)) {
    throw DomainError("integral |u(x)| / (1 + x^2) dx diverges: " + quad::describe(r));
  }
}

}  // namespace

QuadResult hilbert_numeric(const std::function<double(double)>& u, double t,
                           const HilbertOptions& opts) {
  if (!std::isfinite(t)) throw DomainError("transform needs a finite t");
  const bool even = opts.parity == InputParity::Even;
  if (opts.check_integrability) check_integrable(u, even);
  const quad::PVParams p = opts.pv ? *opts.pv : quad::PVParams::defaults_for(t);
  p.validate(t);

  if (even) {
    if (t == 0.0) return QuadResult{0.0, 0.0, true, false, 0.0};
    if (t > 0.0) return even_positive(u, t, p);
    return scaled(even_positive(u, -t, p), -1.0);
  }
  if (t == 0.0) return general_at_zero(u, p);
  if (t > 0.0) return general_positive(u, t, p);
  // H[u](t) = -H[v](-t) with v(x) = u(-x).
  auto reflected = [&u](double x) { return u(-x); };
  return scaled(general_positive(reflected, -t, p), -1.0);
}

QuadResult hilbert_e_numeric(const std::function<double(double)>& u, double t,
                             const HilbertOptions& opts) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("half-line transform needs t > 0");
  // x^2 underflows to 0 for |x| below ~1e-154, where a log or negative power
  // in u would blow up; clamping to the smallest normal changes the integral
  // by far less than rounding.
  auto lifted = [&u](double x) { return u(std::max(x * x, std::numeric_limits<double>::min())); };
  HilbertOptions even = opts;
  even.parity = InputParity::Even;
  const double s = std::sqrt(t);
  if (!opts.pv) even.pv = quad::PVParams::defaults_for(s);
  return hilbert_numeric(lifted, s, even);
}

std::vector<QuadResult> hilbert_grid(const std::function<double(double)>& u,
                                     const std::vector<double>& grid, const HilbertOptions& opts,
                                     Exec exec) {
  if (opts.check_integrability) check_integrable(u, opts.parity == InputParity::Even);
  HilbertOptions point = opts;
  point.check_integrability = false;
  return indexed_map(
      grid.size(), [&](std::size_t i) { return hilbert_numeric(u, grid[i], point); }, exec);
}

std::vector<CrossValidationEntry> CrossValidationReport::failures() const {
  std::vector<CrossValidationEntry> out;
  for (const auto& e : entries) {
    if (!e.ok) out.push_back(e);
  }
  return out;
}

CrossValidationReport cross_validate(const LogDensityExpr& u, const std::vector<double>& grid,
                                     double tol, Transform which, Exec exec) {
  CrossValidationReport report;
  if (grid.empty()) return report;

  const HilbertExpr symbolic =
      which == Transform::H ? hilbert_symbolic(u) : hilbert_e_symbolic(u);
  std::function<double(double)> fn = [u](double x) { return u(x); };
  HilbertOptions opts;
  opts.parity = InputParity::Even;
  opts.check_integrability = false;

  report.entries = indexed_map(
      grid.size(),
      [&](std::size_t i) {
        CrossValidationEntry e;
        e.t = grid[i];
        e.symbolic = symbolic(e.t);
        try {
          const QuadResult r =
              which == Transform::H ? hilbert_numeric(fn, e.t, opts) : hilbert_e_numeric(fn, e.t, opts);
          e.numeric = r.value;
          e.error_estimate = r.abs_error;
          e.ok = std::abs(e.symbolic - e.numeric) <= tol * std::max(1.0, std::abs(e.symbolic));
        } catch (const std::exception& ex) {
          e.numeric = std::numeric_limits<double>::quiet_NaN();
          e.failure = ex.what();
          e.ok = false;
        }
        return e;
      },
      exec);

  for (const auto& e : report.entries) {
    if (std::isfinite(e.numeric)) {
      report.max_discrepancy = std::max(report.max_discrepancy, std::abs(e.symbolic - e.numeric));
    }
    report.pass = report.pass && e.ok;
  }
  return report;
}

}  // namespace ks
