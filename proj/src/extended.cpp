#include "ks/extended.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/float128.hpp>
#include <cmath>
#include <sstream>
#include <vector>

#include "ks/errors.hpp"

namespace ks::extended {

namespace {

using boost::multiprecision::float128;

const float128 kPi = boost::math::constants::pi<float128>();
const float128 kEps = std::numeric_limits<float128>::epsilon();
const float128 kTol = float128(1e-30);

struct Term {
  float128 coeff;
  float128 exponent;
};

struct Model {
  float128 c = 0, a = 0;
  std::vector<Term> u_terms;
  float128 phase_base = 0;
  std::vector<Term> phase_terms;
  PhaseRule rule = PhaseRule::RealLine;
  Trig trig = Trig::Cos;
  float128 power = 0;
  int int_power = 0;
  float128 lead = 0, eps = 1;
};

float128 ipow(float128 x, int k) {
  float128 r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

float128 log_density(const Model& m, float128 ax) {
  float128 v = m.c;
  if (m.a != 0) v += m.a * log(ax);
  for (const auto& t : m.u_terms) v += t.coeff * pow(ax, t.exponent);
  return v;
}

// Phase on x > 0; the real-line phase is odd.
float128 phase_positive(const Model& m, float128 ax) {
  float128 v = m.phase_base;
  for (const auto& t : m.phase_terms) v += t.coeff * pow(ax, t.exponent);
  return v;
}

float128 trig(const Model& m, float128 phi) { return m.trig == Trig::Cos ? cos(phi) : sin(phi); }

float128 integrand(const Model& m, float128 x) {
  if (!(x > 0)) return 0;
  const float128 f = exp(log_density(m, x));
  if (f == 0) return 0;
  const float128 phi = phase_positive(m, x);
  if (m.rule == PhaseRule::HalfLine) {
    return pow(x, m.power) * f * (m.lead + m.eps * trig(m, phi));
  }
  // Both signs evaluated as written: (+x)^k f (lead + eps trig(phi)) and
  // (-x)^k f (lead + eps trig(-phi)).
  const float128 plus = ipow(x, m.int_power) * f * (m.lead + m.eps * trig(m, phi));
  const float128 minus = ipow(-x, m.int_power) * f * (m.lead + m.eps * trig(m, -phi));
  return plus + minus;
}

Model build(const Integrand& spec) {
  Model m;
  m.rule = spec.rule;
  m.trig = spec.trig;
  m.power = spec.power;
  m.lead = spec.lead;
  m.eps = spec.eps;
  m.c = spec.u.constant();
  m.a = spec.u.log_coeff();
  if (spec.rule == PhaseRule::RealLine) {
    if (spec.power != std::floor(spec.power) || spec.power < 0) {
      throw DomainError("real-line moments need a nonnegative integer power");
    }
    m.int_power = static_cast<int>(spec.power);
    m.phase_base = -m.a * kPi / 2;
  } else {
    m.phase_base = -m.a * kPi;
  }
  for (const auto& pt : spec.u.powers()) {
    const float128 mu = pt.exponent;
    const float128 b = pt.coeff;
    m.u_terms.push_back({b, mu});
    if (spec.rule == PhaseRule::RealLine) {
      if (!(std::abs(pt.exponent) < 1.0)) throw UnsupportedTerm("no closed-form transform for exponent");
      m.phase_terms.push_back({-b * tan(mu * kPi / 2), mu});
    } else {
      if (!(std::abs(2.0 * pt.exponent) < 1.0)) {
        throw UnsupportedTerm("no closed-form half-line transform for exponent");
      }
      m.phase_terms.push_back({-b * tan(mu * kPi), mu});
    }
  }
  return m;
}

struct Acc {
  float128 value = 0, error = 0, l1 = 0;
};

boost::math::quadrature::tanh_sinh<float128>& rule() {
  thread_local boost::math::quadrature::tanh_sinh<float128> ts(15);
  return ts;
}

Acc piece(const Model& m, float128 a, float128 b) {
  float128 err = 0, l1 = 0;
  float128 v = 0;
  try {
    v = rule().integrate([&m](float128 x) { return integrand(m, x); }, a, b, kTol, &err, &l1);
  } catch (const std::exception& e) {
    throw AccuracyError(std::string("extended-precision panel failed: ") + e.what(), 0.0, 0.0);
  }
  Acc r;
  r.value = v;
  r.l1 = l1;
  r.error = std::max(err, 100 * kEps * l1);
  return r;
}

}  // namespace

Result integrate(const Integrand& spec) {
  const Model m = build(spec);

  Acc total = piece(m, 0, 1);
  float128 x = 1;
  float128 prev_panel = -1;
  bool settled = false;
  // Geometric panels, each cut so the phase moves by at most pi/2 per piece.
  while (x < float128(1e40)) {
    const float128 next = 2 * x;
    const float128 swing = abs(phase_positive(m, next) - phase_positive(m, x));
    const int parts = std::max(1, static_cast<int>(ceil(swing / (kPi / 2)).convert_to<double>()));
    Acc panel;
    for (int i = 0; i < parts; ++i) {
      const float128 lo = x + (next - x) * i / parts;
      const float128 hi = i + 1 == parts ? next : x + (next - x) * (i + 1) / parts;
      const Acc p = piece(m, lo, hi);
      panel.value += p.value;
      panel.error += p.error;
      panel.l1 += p.l1;
    }
    total.value += panel.value;
    total.error += panel.error;
    total.l1 += panel.l1;
    x = next;
    const bool tiny = panel.l1 <= float128(1e-40) * total.l1;
    if (tiny && prev_panel >= 0 && prev_panel <= float128(1e-40) * total.l1 && panel.l1 <= prev_panel) {
      // Remaining tail is bounded by the last (decaying) panel.
      total.error += panel.l1;
      settled = true;
      break;
    }
    prev_panel = panel.l1;
  }

  Result r;
  r.value = total.value.convert_to<double>();
  r.abs_error = total.error.convert_to<double>();
  r.magnitude = total.l1.convert_to<double>();
  r.converged = settled && (total.error == 0 || total.error <= float128(1e-25) * total.l1);
  return r;
}

}  // namespace ks::extended
