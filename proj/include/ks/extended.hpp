#pragma once

#include "ks/density.hpp"
#include "ks/log_expr.hpp"

namespace ks::extended {

// Quad-precision (113-bit) quadrature for integrands built from a closed-form
// log-density u and its closed-form transform:
//
//   integral x^p exp(u(x)) (lead + eps * trig(phase(x))) dx
//
// The double coefficients of u are taken as exact and the phase coefficients
// (pi, tan) are recomputed in quad precision, so the identity being checked
// holds for precisely the density that is integrated. Used where the
// cancellation in a vanishing moment is beyond double precision.

enum class Trig { Cos, Sin };

// Which closed-form phase: the real-line transform (odd, sgn-carrying) or the
// half-line transform.
enum class PhaseRule { RealLine, HalfLine };

struct Integrand {
  LogDensityExpr u;
  PhaseRule rule = PhaseRule::RealLine;
  Trig trig = Trig::Cos;
  double power = 0.0;  // p; half-integers allowed on the half line
  double lead = 0.0;
  double eps = 1.0;
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  double magnitude = 0.0;  // integral of the absolute integrand
  bool converged = false;
};

// Over the support implied by the rule: the real line (folded, both signs
// evaluated literally) or (0, inf). Integer power required on the real line.
// Throws UnsupportedTerm if the transform has no closed form for u.
Result integrate(const Integrand& spec);

}  // namespace ks::extended
