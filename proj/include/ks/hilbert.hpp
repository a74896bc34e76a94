#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ks/log_expr.hpp"
#include "ks/parallel.hpp"
#include "ks/quadrature.hpp"

namespace ks {

enum class Parity { Even, OddViaSgn };

// coeff * |t|^exponent (Even) or coeff * sgn(t) |t|^exponent (OddViaSgn).
struct HilbertTerm {
  double coeff = 0.0;
  double exponent = 0.0;
  Parity parity = Parity::OddViaSgn;

  friend bool operator==(const HilbertTerm&, const HilbertTerm&) = default;
};

// constant + sgn_coeff * sgn(t) + sum of terms.
struct HilbertExpr {
  double constant = 0.0;
  double sgn_coeff = 0.0;
  std::vector<HilbertTerm> terms;

  // Sign-carrying parts are dropped at t = 0.
  double operator()(double t) const;

  HilbertExpr& operator+=(const HilbertExpr& rhs);
  HilbertExpr& operator*=(double s);
  friend HilbertExpr operator+(HilbertExpr a, const HilbertExpr& b) { return a += b; }
  friend HilbertExpr operator*(double s, HilbertExpr a) { return a *= s; }
  friend bool operator==(const HilbertExpr&, const HilbertExpr&) = default;
};

// Transform of u = c + a ln|x| + sum b |x|^mu, term by term:
//   c -> 0,  a ln|x| -> -a pi/2 sgn(t),  b |x|^mu -> -b tan(mu pi/2) sgn(t) |t|^mu.
// Throws UnsupportedTerm unless every exponent satisfies 0 < |mu| < 1.
HilbertExpr hilbert_symbolic(const LogDensityExpr& u);

// Half-line transform of u on (0, inf), valid for t > 0:
//   c -> 0,  a ln x -> -a pi,  b x^mu -> -b tan(mu pi) t^mu.
// Throws UnsupportedTerm unless every exponent satisfies 0 < |2 mu| < 1.
HilbertExpr hilbert_e_symbolic(const LogDensityExpr& u);

enum class InputParity { Even, General };

struct HilbertOptions {
  InputParity parity = InputParity::General;
  // Defaults to PVParams::defaults_for(t) when empty.
  std::optional<quad::PVParams> pv;
  // Check integral |u| / (1 + x^2) < inf first (DomainError otherwise).
  bool check_integrability = true;
};

// Numeric transform
//   (1/pi) PV integral (1/(t - x) + x/(1 + x^2)) u(x) dx.
// Even inputs use (2t/pi) PV integral_0^inf u(x) / (t^2 - x^2) dx, which is 0
// at t = 0. Throws AccuracyError when the quadrature does not converge.
quad::QuadResult hilbert_numeric(const std::function<double(double)>& u, double t,
                                 const HilbertOptions& opts = {});

// Half-line transform at t > 0: the transform of the even function u(x^2)
// evaluated at sqrt(t).
quad::QuadResult hilbert_e_numeric(const std::function<double(double)>& u, double t,
                                   const HilbertOptions& opts = {});

// integral |u(x)| / (1 + x^2) over the real line (or the half line).
quad::QuadResult log_integrability(const std::function<double(double)>& u, bool even);

enum class Transform { H, He };

struct CrossValidationEntry {
  double t = 0.0;
  double symbolic = 0.0;
  double numeric = 0.0;
  double error_estimate = 0.0;
  bool ok = false;
  std::string failure;  // set when the numeric path threw
};

struct CrossValidationReport {
  std::vector<CrossValidationEntry> entries;
  double max_discrepancy = 0.0;
  bool pass = true;
  std::vector<CrossValidationEntry> failures() const;
};

// Symbolic vs numeric over a grid; an entry passes when
// |symbolic - numeric| <= tol max(1, |symbolic|).
CrossValidationReport cross_validate(const LogDensityExpr& u, const std::vector<double>& grid,
                                     double tol, Transform which = Transform::H,
                                     Exec exec = Exec::Parallel);

// Numeric transform over a grid. The integrability check runs once up front
// rather than per point.
std::vector<quad::QuadResult> hilbert_grid(const std::function<double(double)>& u,
                                           const std::vector<double>& grid,
                                           const HilbertOptions& opts = {},
                                           Exec exec = Exec::Parallel);

}  // namespace ks
