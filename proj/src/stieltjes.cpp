#include "ks/stieltjes.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ks/errors.hpp"
#include "ks/extended.hpp"
#include "ks/krein.hpp"

namespace ks {

namespace {

using std::numbers::pi;

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

quad::Domain domain_of(const Density& f) {
  return f.support() == Support::RealLine ? quad::Domain::RealLine : quad::Domain::HalfLine;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

void require_moments(const Density& f, int max_order) {
  for (int k = 0; k <= max_order; ++k) {
    bool ok = true;
    try {
      ok = std::isfinite(absolute_moment(f, k));
    } catch (const AccuracyError&) {
      ok = false;
    }
    if (!ok) {
      throw PreconditionError("absolute moment of order " + std::to_string(k) + " is not finite");
    }
  }
}

}  // namespace

std::string to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::CosH:
      return "cos";
    case PerturbationKind::SinH:
      return "sin";
    case PerturbationKind::SinHe:
      return "sin-half-line";
    case PerturbationKind::Custom:
      break;
  }
  return "custom";
}

std::string to_string(OrderStatus s) {
  switch (s) {
    case OrderStatus::Pass:
      return "pass";
    case OrderStatus::Fail:
      return "fail";
    case OrderStatus::Inconclusive:
      break;
  }
  return "inconclusive";
}

Perturbation::Perturbation(PerturbationKind kind, std::function<double(double)> phase_fn,
                           std::optional<HilbertExpr> symbolic)
    : kind_(kind), phase_(std::move(phase_fn)), symbolic_(std::move(symbolic)) {
  if (kind == PerturbationKind::Custom) throw DomainError("use Perturbation::custom");
  if (!phase_) throw DomainError("perturbation needs a phase");
}

Perturbation Perturbation::custom(std::function<double(double)> h) {
  if (!h) throw DomainError("custom perturbation callable is empty");
  Perturbation p(PerturbationKind::CosH, [](double) { return 0.0; }, std::nullopt);
  p.kind_ = PerturbationKind::Custom;
  p.phase_ = {};
  p.custom_ = std::move(h);
  return p;
}

double Perturbation::phase(double t) const {
  if (!phase_) throw DomainError("custom perturbation has no phase");
  return phase_(t);
}

double Perturbation::operator()(double t) const {
  switch (kind_) {
    case PerturbationKind::CosH:
      return std::cos(phase_(t));
    case PerturbationKind::SinH:
      return std::sin(phase_(t));
    case PerturbationKind::SinHe:
      return t > 0.0 ? std::sin(phase_(t)) : 0.0;
    case PerturbationKind::Custom:
      break;
  }
  return custom_(t);
}

std::optional<quad::Oscillation> Perturbation::oscillation() const {
  if (kind_ == PerturbationKind::Custom) return std::nullopt;
  const double offset = kind_ == PerturbationKind::CosH ? pi / 2 : 0.0;
  // The engine wants an eventually increasing phase; a decreasing one has the
  // same zero set after negation.
  bool decreasing = false;
  if (symbolic_ && !symbolic_->terms.empty()) {
    decreasing = symbolic_->terms.back().coeff < 0.0;
  } else if (!symbolic_) {
    decreasing = phase_(100.0) < phase_(10.0);
  }
  if (!decreasing) return quad::Oscillation{phase_, offset};
  auto neg = phase_;
  return quad::Oscillation{[neg](double x) { return -neg(x); }, -offset};
}

StieltjesClass::StieltjesClass(Density center, Perturbation h)
    : center_(std::move(center)), h_(std::move(h)) {}

Density StieltjesClass::member(double eps) const {
  if (!(std::abs(eps) <= 1.0)) throw DomainError("member needs |eps| <= 1");
  if (eps == 0.0) return center_;
  const Perturbation h = h_;
  const bool even = center_.symmetric() && h_.kind() == PerturbationKind::CosH;
  return make_perturbed(center_, [h](double x) { return h(x); }, eps, even);
}

StieltjesClass build_class_real(const Density& f, PerturbationKind kind, int max_order) {
  if (f.support() != Support::RealLine) {
    throw DomainError("build_class_real needs a density on the real line");
  }
  if (kind != PerturbationKind::CosH && kind != PerturbationKind::SinH) {
    throw DomainError("real-line classes use the cos or sin perturbation");
  }
  const KreinVerdict v = krein_check_real(f);
  if (v.status != KreinStatus::Finite) {
    throw PreconditionError("logarithmic integral is " + to_string(v.status) + ": " +
                            first_line(v.diagnostics));
  }
  require_moments(f, max_order);

  if (f.log_expr()) {
    try {
      const HilbertExpr expr = hilbert_symbolic(*f.log_expr());
      return StieltjesClass(f, Perturbation(kind, [expr](double t) { return expr(t); }, expr));
    } catch (const UnsupportedTerm&) {
    }
  }
  HilbertOptions opts;
  opts.parity = f.symmetric() ? InputParity::Even : InputParity::General;
  opts.check_integrability = false;  // implied by the Krein verdict
  auto phase = [f, opts](double t) {
    return hilbert_numeric([&f](double x) { return f.log_density(x); }, t, opts).value;
  };
  return StieltjesClass(f, Perturbation(kind, phase, std::nullopt));
}

StieltjesClass build_class_halfline(const Density& f, int max_order) {
  if (f.support() != Support::PositiveHalfLine) {
    throw DomainError("build_class_halfline needs a density on the positive half line");
  }
  const KreinVerdict v = krein_check_halfline(f);
  if (v.status != KreinStatus::Finite) {
    throw PreconditionError("half-line logarithmic integral is " + to_string(v.status) + ": " +
                            first_line(v.diagnostics));
  }
  require_moments(f, max_order);

  if (f.log_expr()) {
    try {
      const HilbertExpr expr = hilbert_e_symbolic(*f.log_expr());
      return StieltjesClass(
          f, Perturbation(PerturbationKind::SinHe, [expr](double t) { return expr(t); }, expr));
    } catch (const UnsupportedTerm&) {
    }
  }
  HilbertOptions opts;
  opts.check_integrability = false;
  auto phase = [f, opts](double t) {
    if (!(t > 0.0)) return 0.0;
    return hilbert_e_numeric([&f](double x) { return f.log_density(x); }, t, opts).value;
  };
  return StieltjesClass(f, Perturbation(PerturbationKind::SinHe, phase, std::nullopt));
}

namespace {

struct Estimate {
  double value = 0.0;
  double error = 0.0;
  double scale = 0.0;
  bool converged = false;
  bool extended = false;
};

Estimate from_quad(const quad::QuadResult& r) {
  return {r.value, r.abs_error, r.magnitude, r.converged && !r.diverged, false};
}

Estimate from_extended(const extended::Result& r) {
  return {r.value, r.abs_error, r.magnitude, r.converged, true};
}

bool within(const Estimate& e, double target, double bound) {
  return e.converged && std::abs(e.value - target) + e.error <= bound;
}

// The integrand x^power f (lead + eps h) in quad precision, when both the
// density and the phase are closed-form.
std::optional<extended::Integrand> extended_spec(const StieltjesClass& cls, double power,
                                                 double lead, double eps) {
  const Perturbation& h = cls.perturbation();
  if (!cls.center().log_expr() || !h.symbolic_phase()) return std::nullopt;
  extended::Integrand spec;
  spec.u = *cls.center().log_expr();
  spec.power = power;
  spec.lead = lead;
  spec.eps = eps;
  switch (h.kind()) {
    case PerturbationKind::CosH:
      spec.rule = extended::PhaseRule::RealLine;
      spec.trig = extended::Trig::Cos;
      break;
    case PerturbationKind::SinH:
      spec.rule = extended::PhaseRule::RealLine;
      spec.trig = extended::Trig::Sin;
      break;
    case PerturbationKind::SinHe:
      spec.rule = extended::PhaseRule::HalfLine;
      spec.trig = extended::Trig::Sin;
      break;
    case PerturbationKind::Custom:
      return std::nullopt;
  }
  return spec;
}

const std::vector<double> kMemberEps{-1.0, -0.5, 0.5, 1.0};

struct OrderResult {
  double center = 0.0;
  Estimate pert;
  std::vector<double> members;
  bool members_ok = true;
  OrderStatus status = OrderStatus::Inconclusive;
};

OrderResult verify_order(const StieltjesClass& cls, int k, const VerifyOptions& opts) {
  OrderResult out;
  const Density& f = cls.center();
  const Perturbation& h = cls.perturbation();
  try {
    out.center = moment(f, k);
  } catch (const AccuracyError&) {
    return out;
  }
  const double bound = opts.tolerance * std::max(1.0, std::abs(out.center));

  auto pert = [&f, &h, k](double x) {
    const double fx = f.eval(x);
    if (fx == 0.0) return 0.0;
    return ipow(x, k) * fx * h(x);
  };
  out.pert = from_quad(
      quad::integrate_improper(pert, domain_of(f), {opts.quad_tolerance, h.oscillation()}));
  if (!within(out.pert, 0.0, bound) && opts.allow_extended) {
    if (auto spec = extended_spec(cls, k, 0.0, 1.0)) out.pert = from_extended(extended::integrate(*spec));
  }

  if (opts.check_members) {
    for (double eps : kMemberEps) {
      const Density m = cls.member(eps);
      Estimate e = from_quad(moment_by_quadrature(m, k, opts.quad_tolerance));
      if (!within(e, out.center, bound) && opts.allow_extended) {
        if (auto spec = extended_spec(cls, k, 1.0, eps)) e = from_extended(extended::integrate(*spec));
      }
      out.members.push_back(e.value);
      out.members_ok = out.members_ok && within(e, out.center, bound);
    }
  }

  if (!out.pert.converged) {
    out.status = OrderStatus::Inconclusive;
  } else if (within(out.pert, 0.0, bound) && out.members_ok) {
    out.status = OrderStatus::Pass;
  } else {
    out.status = OrderStatus::Fail;
  }
  return out;
}

MomentReport assemble(const std::vector<OrderResult>& rows, const VerifyOptions& opts,
                      bool members) {
  MomentReport rep;
  rep.tolerance = opts.tolerance;
  rep.pass = true;
  if (members) rep.member_epsilons = kMemberEps;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const OrderResult& r = rows[k];
    rep.orders.push_back(static_cast<int>(k));
    rep.center_moments.push_back(r.center);
    rep.perturbation_integrals.push_back(r.pert.value);
    rep.error_estimates.push_back(r.pert.error);
    rep.absolute_scales.push_back(r.pert.scale);
    rep.methods.push_back(r.pert.extended ? "extended" : "double");
    rep.statuses.push_back(r.status);
    if (members) {
      rep.member_moments.push_back(r.members);
      rep.member_ok.push_back(r.members_ok);
    }
    rep.pass = rep.pass && r.status == OrderStatus::Pass;
  }
  return rep;
}

}  // namespace

MomentReport verify_moments(const StieltjesClass& cls, int max_order, const VerifyOptions& opts) {
  if (max_order < 0) throw DomainError("max order must be nonnegative");
  const auto rows = indexed_map(
      static_cast<std::size_t>(max_order + 1),
      [&](std::size_t k) { return verify_order(cls, static_cast<int>(k), opts); }, opts.exec);
  return assemble(rows, opts, opts.check_members);
}

bool verify_nonzero(const StieltjesClass& cls) {
  const Density& f = cls.center();
  const Perturbation& h = cls.perturbation();
  auto g = [&f, &h](double x) {
    const double fx = f.eval(x);
    return fx == 0.0 ? 0.0 : std::abs(fx * h(x));
  };
  const auto r = quad::integrate_improper(g, domain_of(f), {1e-9, std::nullopt});
  return r.value > 10.0 * r.abs_error;
}

MomentReport verify_unbounded_companion(const Density& f, int max_order, const VerifyOptions& opts) {
  if (max_order < 0) throw DomainError("max order must be nonnegative");
  if (f.support() != Support::PositiveHalfLine) {
    throw DomainError("the companion identity lives on the positive half line");
  }
  const StieltjesClass cls = build_class_halfline(f, max_order + 1);
  // Same phase, cos instead of sin.
  std::function<double(double)> phase = [cls](double t) { return cls.perturbation().phase(t); };
  const Perturbation cosine(PerturbationKind::CosH, phase, cls.perturbation().symbolic_phase());
  const quad::Oscillation osc{phase, pi / 2};

  const auto rows = indexed_map(
      static_cast<std::size_t>(max_order + 1),
      [&](std::size_t idx) {
        const double p = static_cast<double>(idx) + 0.5;
        OrderResult out;
        auto plain = [&f, p](double x) {
          const double fx = f.eval(x);
          return fx == 0.0 ? 0.0 : std::pow(x, p) * fx;
        };
        const auto c = quad::integrate_improper(plain, quad::Domain::HalfLine, {opts.quad_tolerance, std::nullopt});
        out.center = c.value;
        const double bound = opts.tolerance * std::max(1.0, std::abs(out.center));
        auto g = [&f, &cosine, p](double x) {
          const double fx = f.eval(x);
          return fx == 0.0 ? 0.0 : std::pow(x, p) * fx * cosine(x);
        };
        out.pert = from_quad(quad::integrate_improper(g, quad::Domain::HalfLine, {opts.quad_tolerance, osc}));
        if (!within(out.pert, 0.0, bound) && opts.allow_extended && f.log_expr() &&
            cls.perturbation().symbolic_phase()) {
          extended::Integrand spec{*f.log_expr(), extended::PhaseRule::HalfLine, extended::Trig::Cos,
                                   p, 0.0, 1.0};
          out.pert = from_extended(extended::integrate(spec));
        }
        if (!out.pert.converged || !c.converged) {
          out.status = OrderStatus::Inconclusive;
        } else {
          out.status = within(out.pert, 0.0, bound) ? OrderStatus::Pass : OrderStatus::Fail;
        }
        return out;
      },
      opts.exec);
  return assemble(rows, opts, false);
}

}  // namespace ks
