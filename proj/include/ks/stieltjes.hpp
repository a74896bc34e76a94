#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ks/density.hpp"
#include "ks/hilbert.hpp"
#include "ks/parallel.hpp"

namespace ks {

// CosH / SinH: cos or sin of the real-line transform of ln f.
// SinHe: sin of the half-line transform of ln f.
// Custom: an arbitrary bounded function (synthetic tests only).
enum class PerturbationKind { CosH, SinH, SinHe, Custom };

std::string to_string(PerturbationKind k);

class Perturbation {
 public:
  // phase_fn is the transform of ln f; symbolic is set when it came from the
  // closed-form rules (and then phase_fn evaluates it).
  Perturbation(PerturbationKind kind, std::function<double(double)> phase_fn,
               std::optional<HilbertExpr> symbolic);
  static Perturbation custom(std::function<double(double)> h);

  PerturbationKind kind() const noexcept { return kind_; }
  const std::optional<HilbertExpr>& symbolic_phase() const noexcept { return symbolic_; }
  bool has_phase() const noexcept { return static_cast<bool>(phase_); }
  double phase(double t) const;

  // h(t) in [-1, 1]. SinHe is 0 for t <= 0.
  double operator()(double t) const;

  // Zeros of h on (0, inf), for the oscillatory quadrature.
  std::optional<quad::Oscillation> oscillation() const;

 private:
  PerturbationKind kind_;
  std::function<double(double)> phase_;
  std::optional<HilbertExpr> symbolic_;
  std::function<double(double)> custom_;
};

class StieltjesClass {
 public:
  StieltjesClass(Density center, Perturbation h);

  const Density& center() const noexcept { return center_; }
  const Perturbation& perturbation() const noexcept { return h_; }
  Support support() const noexcept { return center_.support(); }

  // center(x) (1 + eps h(x)); eps = 0 returns the center itself.
  Density member(double eps) const;

 private:
  Density center_;
  Perturbation h_;
};

// Requires a Finite logarithmic integral (PreconditionError otherwise) and
// finite absolute moments up to max_order. The phase is symbolic when ln f
// has a closed-form transform, numeric otherwise.
StieltjesClass build_class_real(const Density& f, PerturbationKind kind, int max_order = 8);
StieltjesClass build_class_halfline(const Density& f, int max_order = 8);

enum class OrderStatus { Pass, Fail, Inconclusive };

std::string to_string(OrderStatus s);

struct MomentReport {
  std::vector<int> orders;
  std::vector<double> center_moments;
  std::vector<double> perturbation_integrals;  // integral x^k f h
  std::vector<double> error_estimates;
  std::vector<double> absolute_scales;  // integral |x^k f h|
  std::vector<std::string> methods;     // "double" or "extended"
  std::vector<OrderStatus> statuses;
  // member_epsilons[j] paired with member_moments[k][j].
  std::vector<double> member_epsilons;
  std::vector<std::vector<double>> member_moments;
  std::vector<bool> member_ok;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  double tolerance = 1e-7;
  double quad_tolerance = 1e-9;
  bool check_members = true;
  // Retry in quad precision when double cannot certify an order and the
  // phase is closed-form.
  bool allow_extended = true;
  Exec exec = Exec::Parallel;
};

// Orders 0..K. An order passes when |integral x^k f h| plus its error estimate
// stays within tolerance * max(1, |center moment|), and (if requested) every
// member moment matches the center moment within the same bound.
MomentReport verify_moments(const StieltjesClass& cls, int max_order,
                            const VerifyOptions& opts = {});

// integral |f h| > 10 * its error estimate.
bool verify_nonzero(const StieltjesClass& cls);

// The unbounded companion x^{1/2} cos(He ln f) on the half line: checks
// integral_0^inf x^{k + 1/2} f(x) cos(He ln f(x)) dx = 0 for k = 0..K. It is
// a vanishing-integral identity only, never a class perturbation.
MomentReport verify_unbounded_companion(const Density& f, int max_order,
                                        const VerifyOptions& opts = {});

}  // namespace ks
