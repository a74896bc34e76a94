#pragma once

#include <optional>
#include <string>

#include "ks/density.hpp"

namespace ks {

enum class KreinStatus { Finite, Divergent, Inconclusive };

std::string to_string(KreinStatus s);

enum class KreinMethod { Auto, Symbolic, Numeric };

struct KreinVerdict {
  KreinStatus status = KreinStatus::Inconclusive;
  std::optional<double> value;  // present iff status == Finite
  double error_estimate = 0.0;
  KreinMethod method = KreinMethod::Numeric;  // the path actually taken
  std::string diagnostics;
};

// integral over R of -ln f(x) / (1 + x^2).
//
// Symbolic path (log_expr present): Finite iff every power exponent mu lies
// in (-1, 1); the value then comes from quadrature. Numeric path: improper
// quadrature of |ln f| / (1 + x^2) with the cutoff-growth divergence test.
// Throws DomainError for a density not on the real line or one that vanishes
// at a sampled point.
KreinVerdict krein_check_real(const Density& f, KreinMethod method = KreinMethod::Auto);

// integral over (0, inf) of -ln f(x^2) / (1 + x^2). Symbolic test: every
// exponent satisfies -1 < 2 mu < 1.
KreinVerdict krein_check_halfline(const Density& f, KreinMethod method = KreinMethod::Auto);

// Partial integrals of |g| over [0, 2^j], j = 0..levels, one row per line.
std::string cutoff_growth_table(const quad::Integrand& g, int levels = 12);

}  // namespace ks
