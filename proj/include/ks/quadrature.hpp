#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ks::quad {

using Integrand = std::function<double(double)>;

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  bool converged = false;
  // Partial integrals over growing cutoffs did not settle. Distinct from a
  // plain accuracy failure.
  bool diverged = false;
  // Integral of |g| over the same range; the scale every tolerance refers to.
  double magnitude = 0.0;

  QuadResult& operator+=(const QuadResult& rhs);
};

QuadResult operator+(QuadResult a, const QuadResult& b);

// Scale a result by a constant (value, error and magnitude together).
QuadResult scaled(QuadResult r, double s);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// Parameters of the principal-value engine.
struct PVParams {
  double excision_radius = 1e-3;  // half-width of the panels hugging t
  int panel_order = 32;           // Gauss-Legendre nodes per panel
  double tail_cutoff = 4.0;       // where a Hilbert kernel tail is handed to the improper engine
  double target_rel_tol = 1e-9;

  // delta = 1e-3 max(1,|t|), X_max = 2 max(1, 2|t|).
  static PVParams defaults_for(double t);
  void validate(double t) const;
};

// Adaptive composite Gauss-Legendre on a finite interval. The tolerance is
// relative to the integral of |g| (so integrals that cancel to ~0 are still
// resolved to a meaningful accuracy).
QuadResult integrate(const Integrand& g, double a, double b, double rel_tol = 1e-10,
                     int panel_order = 32);

// Double-exponential (tanh-sinh) rule on a finite interval; tolerates
// integrable singularities at either endpoint.
QuadResult integrate_endpoint_singular(const Integrand& g, double a, double b,
                                       double rel_tol = 1e-10);

// PV of  integral_a^b g(x) / (t - x) dx  by singularity subtraction:
//   g(t) ln|(t-a)/(b-t)|  +  integral_a^b (g(x) - g(t)) / (t - x) dx.
// The remainder is integrated on panels with breakpoints at t - delta, t,
// t + delta; panels touching a or b use the endpoint-singular rule.
// If t lies outside [a, b] the ordinary integral is returned.
QuadResult pv_integrate(const Integrand& g, double t, Interval domain, const PVParams& params);

enum class Domain { HalfLine, RealLine };

// Sign changes of an oscillating factor, described by a phase that is
// eventually increasing: the factor vanishes where phase(x) = offset + j pi.
struct Oscillation {
  std::function<double(double)> phase;
  double zero_offset = 0.0;
};

struct ImproperOptions {
  double target_rel_tol = 1e-9;
  std::optional<Oscillation> oscillation;
};

// integral over [0, inf) or (-inf, inf). The real line is folded onto
// [0, inf) as g(x) + g(-x).
//
// Non-oscillatory integrands: [0, 1] by tanh-sinh, then partial integrals
// over doubling cutoffs X, 2X, 4X, ... (these feed the divergence test), then
// the tail beyond the last cutoff through x = 1/s.
//
// Oscillatory integrands: after the head, one panel per lobe between
// consecutive zeros of the oscillating factor; the partial sums are summed
// directly while the lobes decay fast and accelerated (Wynn epsilon) when
// they do not.
QuadResult integrate_improper(const Integrand& g, Domain domain, const ImproperOptions& opts = {});

// integral over [a, inf), a >= 0, same machinery.
QuadResult integrate_from(const Integrand& g, double a, const ImproperOptions& opts = {});

// Wynn epsilon extrapolation of a sequence of partial sums. Returns the
// latest even-column estimate; *err receives the difference between the two
// most recent estimates.
double wynn_epsilon(const std::vector<double>& partial_sums, double* err = nullptr);

std::string describe(const QuadResult& r);

}  // namespace ks::quad
