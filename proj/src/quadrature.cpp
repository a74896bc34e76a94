#include "ks/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <boost/math/tools/roots.hpp>

#include "ks/errors.hpp"

namespace ks::quad {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Relative accuracy below this is roundoff, not quadrature error.
constexpr double kTolFloor = 100.0 * kEps;
// Beyond this abscissa, a non-finite integrand value in a mapped tail is
// taken as an overflow of an already negligible contribution.
constexpr double kTailOverflowX = 1e150;

struct GaussRule {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

const GaussRule& gauss_rule(int n) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  const auto zeros = boost::math::legendre_p_zeros<double>(n);
  for (double x : zeros) {
    const double dp = boost::math::legendre_p_prime(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes.push_back(x);
    rule.weights.push_back(w);
    if (x != 0.0) {
      rule.nodes.push_back(-x);
      rule.weights.push_back(w);
    }
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

double checked(const Integrand& g, double x) {
  const double y = g(x);
  if (!std::isfinite(y)) {
    std::ostringstream os;
    os.precision(17);
    os << "integrand is not finite at x = " << x;
    throw DomainError(os.str());
  }
  return y;
}

struct PanelSum {
  double value = 0.0;
  double l1 = 0.0;
};

PanelSum gauss_panel(const Integrand& g, double a, double b, const GaussRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  PanelSum s;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double y = checked(g, mid + half * rule.nodes[i]);
    s.value += rule.weights[i] * y;
    s.l1 += rule.weights[i] * std::abs(y);
  }
  s.value *= half;
  s.l1 *= std::abs(half);
  return s;
}

struct Panel {
  double a, b;
  PanelSum left, right;
  double err;

  double value() const { return left.value + right.value; }
  double l1() const { return left.l1 + right.l1; }
};

Panel make_panel(const Integrand& g, double a, double b, double whole, const GaussRule& rule) {
  const double m = 0.5 * (a + b);
  Panel p{a, b, gauss_panel(g, a, m, rule), gauss_panel(g, m, b, rule), 0.0};
  p.err = std::max(std::abs(whole - p.value()), 50.0 * kEps * p.l1());
  return p;
}

void finalize(QuadResult& r, double rel_tol) {
  const double scale = std::max(r.magnitude, std::numeric_limits<double>::min());
  r.converged = !r.diverged && (r.abs_error == 0.0 || r.abs_error <= rel_tol * scale);
}

boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  return rule;
}

}  // namespace

QuadResult& QuadResult::operator+=(const QuadResult& rhs) {
  value += rhs.value;
  abs_error += rhs.abs_error;
  magnitude += rhs.magnitude;
  converged = converged && rhs.converged;
  diverged = diverged || rhs.diverged;
  return *this;
}

QuadResult operator+(QuadResult a, const QuadResult& b) { return a += b; }

QuadResult scaled(QuadResult r, double s) {
  r.value *= s;
  r.abs_error *= std::abs(s);
  r.magnitude *= std::abs(s);
  return r;
}

PVParams PVParams::defaults_for(double t) {
  PVParams p;
  p.excision_radius = 1e-3 * std::max(1.0, std::abs(t));
  p.panel_order = 32;
  p.tail_cutoff = 2.0 * std::max(1.0, 2.0 * std::abs(t));
  p.target_rel_tol = 1e-9;
  return p;
}

void PVParams::validate(double t) const {
  if (!(excision_radius > 0.0)) throw DomainError("excision radius must be positive");
  if (panel_order < 8) throw DomainError("panel order must be at least 8");
  if (!(tail_cutoff > std::max(1.0, 2.0 * std::abs(t)))) {
    throw DomainError("tail cutoff must exceed max(1, 2|t|)");
  }
  if (!(target_rel_tol > 0.0)) throw DomainError("target tolerance must be positive");
}

QuadResult integrate(const Integrand& g, double a, double b, double rel_tol, int panel_order) {
  if (!(a < b)) {
    if (a == b) return QuadResult{0.0, 0.0, true, false, 0.0};
    return scaled(integrate(g, b, a, rel_tol, panel_order), -1.0);
  }
  const GaussRule& rule = gauss_rule(panel_order);
  const double tol = std::max(rel_tol, kTolFloor);
  constexpr std::size_t kMaxPanels = 4000;

  auto by_error = [](const Panel& x, const Panel& y) { return x.err < y.err; };
  std::vector<Panel> heap;
  heap.push_back(make_panel(g, a, b, gauss_panel(g, a, b, rule).value, rule));

  auto totals = [&heap] {
    double err = 0.0, l1 = 0.0;
    for (const auto& p : heap) {
      err += p.err;
      l1 += p.l1();
    }
    return std::pair{err, l1};
  };

  auto [err, l1] = totals();
  while (err > tol * l1 && heap.size() < kMaxPanels) {
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Panel worst = heap.back();
    heap.pop_back();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(worst.a < m && m < worst.b)) {
      // Interval no longer representable; keep it as is.
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_error);
      break;
    }
    err -= worst.err;
    l1 -= worst.l1();
    for (const Panel& child : {make_panel(g, worst.a, m, worst.left.value, rule),
                               make_panel(g, m, worst.b, worst.right.value, rule)}) {
      err += child.err;
      l1 += child.l1();
      heap.push_back(child);
      std::push_heap(heap.begin(), heap.end(), by_error);
    }
    if (heap.size() % 64 == 0) std::tie(err, l1) = totals();
  }

  // Sum in position order so the result does not depend on heap layout.
  std::sort(heap.begin(), heap.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  QuadResult r;
  for (const auto& p : heap) {
    r.value += p.value();
    r.abs_error += p.err;
    r.magnitude += p.l1();
  }
  finalize(r, tol);
  return r;
}

QuadResult integrate_endpoint_singular(const Integrand& g, double a, double b, double rel_tol) {
  if (!(a < b)) {
    if (a == b) return QuadResult{0.0, 0.0, true, false, 0.0};
    return scaled(integrate_endpoint_singular(g, b, a, rel_tol), -1.0);
  }
  const double tol = std::max(rel_tol, kTolFloor);
  double err = 0.0, l1 = 0.0;
  double value = 0.0;
  try {
    value = tanh_sinh_rule().integrate([&g](double x) { return checked(g, x); }, a, b, tol, &err,
                                       &l1);
  } catch (const boost::math::evaluation_error& e) {
    throw DomainError(e.what());
  }
  QuadResult r{value, std::max(err, 10.0 * kEps * l1), false, false, l1};
  finalize(r, tol);
  return r;
}

QuadResult pv_integrate(const Integrand& g, double t, Interval domain, const PVParams& params) {
  const double a = domain.lower;
  const double b = domain.upper;
  if (!(a < b)) throw DomainError("PV domain must satisfy lower < upper");
  if (!(params.excision_radius > 0.0)) throw DomainError("excision radius must be positive");
  if (params.panel_order < 8) throw DomainError("panel order must be at least 8");
  if (t == a || t == b) throw DomainError("PV evaluation point on the domain boundary");
  const double tol = params.target_rel_tol;

  if (t < a || t > b) {
    auto plain = [&g, t](double x) { return g(x) / (t - x); };
    return integrate_endpoint_singular(plain, a, b, tol);
  }

  const double gt = g(t);
  if (!std::isfinite(gt)) throw DomainError("PV numerator is not finite at the singular point");

  const double log_term = gt * std::log((t - a) / (b - t));
  // Deep refinement next to t can round a node onto t itself.
  auto remainder = [&g, t, gt](double x) { return x == t ? 0.0 : (g(x) - gt) / (t - x); };

  const double w = std::min({params.excision_radius, 0.5 * (t - a), 0.5 * (b - t)});
  const double piece_tol = std::max(0.125 * tol, kTolFloor);
  QuadResult r = integrate(remainder, t - w, t, piece_tol, params.panel_order);
  r += integrate(remainder, t, t + w, piece_tol, params.panel_order);
  r += integrate_endpoint_singular(remainder, a, t - w, piece_tol);
  r += integrate_endpoint_singular(remainder, t + w, b, piece_tol);

  r.value += log_term;
  r.magnitude += std::abs(log_term);
  r.abs_error += 4.0 * kEps * std::abs(log_term);
  finalize(r, tol);
  return r;
}

double wynn_epsilon(const std::vector<double>& s, double* err) {
  const std::size_t n = s.size();
  if (n == 0) {
    if (err) *err = 0.0;
    return 0.0;
  }
  if (n < 3) {
    if (err) *err = n == 2 ? std::abs(s[1] - s[0]) : 0.0;
    return s.back();
  }
  // Columns e_{k}^{(j)}, j indexing the starting partial sum. Even columns
  // carry estimates.
  std::vector<double> prev(n, 0.0);  // e_{k-1}
  std::vector<double> cur = s;       // e_k
  double best = s.back();
  double previous_best = s[n - 2];
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t len = n - k;
    std::vector<double> next(len);
    for (std::size_t j = 0; j < len; ++j) {
      const double diff = cur[j + 1] - cur[j];
      if (diff == 0.0) {
        // Exact convergence in this column.
        if (err) *err = std::abs(best - previous_best);
        return k % 2 == 1 ? cur[j + 1] : best;
      }
      next[j] = prev[j + 1] + 1.0 / diff;
    }
    prev = std::move(cur);
    cur = std::move(next);
    if (k % 2 == 0) {
      previous_best = len >= 2 ? cur[len - 2] : best;
      best = cur[len - 1];
    }
  }
  if (err) *err = std::abs(best - previous_best);
  return best;
}

namespace {

// integral_X^inf g(x) dx through x = 1/s.
QuadResult tail_by_inversion(const Integrand& g, double x_start, double tol) {
  const double deep = std::min(kTailOverflowX, 1e8 * x_start);
  auto mapped = [&g, deep](double s) {
    const double x = 1.0 / s;
    if (!std::isfinite(x)) return 0.0;
    const double y = g(x);
    if (y == 0.0) return 0.0;
    const double v = (y * x) * x;
    // Deep in a tail whose decay the cutoff probe already established,
    // overflow in the caller's formula stands for a negligible value.
    if (!std::isfinite(v) && x > deep) return 0.0;
    return v;
  };
  return integrate_endpoint_singular(mapped, 0.0, 1.0 / x_start, tol);
}

QuadResult doubling_then_tail(const Integrand& g, double x0, double tol) {
  constexpr int kMinDoublings = 4;
  constexpr double kGrowthRatio = 0.99;
  // Algebraic tails have increment ratios that settle to a constant; a
  // stretched exponential can grow for many doublings but its log-ratio keeps
  // falling by an increasing amount.
  constexpr double kSettled = 1e-2;

  QuadResult acc{0.0, 0.0, true, false, 0.0};
  std::vector<double> masses;
  double x = x0;
  bool growing = false;
  while (x < 1e150) {
    const QuadResult inc = integrate(g, x, 2.0 * x, tol);
    acc += inc;
    masses.push_back(inc.magnitude);
    x *= 2.0;

    const std::size_t m = masses.size();
    if (inc.magnitude == 0.0) {
      growing = false;
      break;
    }
    if (m < kMinDoublings + 2) continue;
    growing = true;
    bool settled = true;
    for (std::size_t i = m - kMinDoublings; i < m; ++i) {
      if (!(masses[i] >= kGrowthRatio * masses[i - 1])) growing = false;
      const double d = std::log(masses[i] / masses[i - 1]) - std::log(masses[i - 1] / masses[i - 2]);
      if (!(std::abs(d) <= kSettled)) settled = false;
    }
    if (growing && settled) break;
    // Hand over to the inversion only once the decay is algebraic-looking or
    // what is left is negligible; the map is poor on a stretched-exponential
    // bump.
    if (masses[m - 1] < 0.9 * masses[m - 2] && (settled || masses[m - 1] <= tol * acc.magnitude)) {
      break;
    }
  }
  if (growing) {
    acc.diverged = true;
    acc.converged = false;
    return acc;
  }
  acc += tail_by_inversion(g, x, tol);
  return acc;
}

// First x > from with phase(x) >= target; nullopt when the phase does not get
// there before the overflow guard.
std::optional<double> next_crossing(const std::function<double(double)>& phase, double from,
                                    double target) {
  double lo = from;
  double hi = from * 1.5 + 1e-3;
  double phi_hi = phase(hi);
  int guard = 0;
  while (phi_hi < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > kTailOverflowX || ++guard > 600) return std::nullopt;
    phi_hi = phase(hi);
  }
  boost::math::tools::eps_tolerance<double> stop(50);
  std::uintmax_t iters = 100;
  auto f = [&](double x) { return phase(x) - target; };
  const double f_lo = f(lo);
  if (f_lo >= 0.0) return lo;
  const auto [l, h] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, phi_hi - target, stop, iters);
  return 0.5 * (l + h);
}

QuadResult oscillatory_tail(const Integrand& g, const Oscillation& osc, double x0, double tol) {
  constexpr int kMaxLobes = 4000;
  constexpr int kMinForAcceleration = 10;

  QuadResult acc{0.0, 0.0, true, false, 0.0};
  std::vector<double> partial;
  std::vector<double> masses;
  double lobe_error = 0.0;
  double x = x0;
  double accelerated_prev = std::numeric_limits<double>::quiet_NaN();

  const double phi0 = osc.phase(x0);
  double target = std::numeric_limits<double>::quiet_NaN();
  if (std::isfinite(phi0)) {
    target = osc.zero_offset + std::ceil((phi0 - osc.zero_offset) / std::numbers::pi) * std::numbers::pi;
    if (target <= phi0) target += std::numbers::pi;
  }

  for (int j = 0; j < kMaxLobes && std::isfinite(target); ++j, target += std::numbers::pi) {
    const auto next = next_crossing(osc.phase, x, target);
    if (!next || !(*next > x)) break;

    const QuadResult lobe = integrate(g, x, *next, tol);
    acc.value += lobe.value;
    acc.magnitude += lobe.magnitude;
    acc.converged = acc.converged && lobe.converged;
    lobe_error += lobe.abs_error;
    partial.push_back(acc.value);
    masses.push_back(lobe.magnitude);
    x = *next;

    const std::size_t m = masses.size();
    const bool decaying = m >= 3 && masses[m - 1] <= masses[m - 2] && masses[m - 2] <= masses[m - 3];
    const double scale = std::max(acc.magnitude, std::numeric_limits<double>::min());
    if (decaying && masses[m - 1] <= 1e-2 * tol * scale && masses[m - 2] <= 1e-2 * tol * scale) {
      // Remaining lobes are smaller than the last one and alternate.
      acc.abs_error = lobe_error + masses[m - 1];
      finalize(acc, tol);
      return acc;
    }
    if (decaying && static_cast<int>(m) >= kMinForAcceleration) {
      double werr = 0.0;
      const std::size_t window = std::min<std::size_t>(partial.size(), 41);
      std::vector<double> tail(partial.end() - static_cast<std::ptrdiff_t>(window), partial.end());
      const double est = wynn_epsilon(tail, &werr);
      if (std::isfinite(est) && std::isfinite(accelerated_prev)) {
        const double spread = std::abs(est - accelerated_prev) + werr;
        if (spread <= tol * scale) {
          acc.value = est;
          acc.abs_error = lobe_error + spread;
          finalize(acc, tol);
          return acc;
        }
      }
      accelerated_prev = est;
    }
  }

  // The phase stopped producing zeros (or the lobe budget ran out): finish
  // with the non-oscillatory tail machinery.
  acc.abs_error = lobe_error;
  QuadResult rest = doubling_then_tail(g, std::max(x, 1.0), tol);
  acc += rest;
  finalize(acc, tol);
  if (rest.diverged) {
    acc.diverged = true;
    acc.converged = false;
  }
  return acc;
}

}  // namespace

QuadResult integrate_from(const Integrand& g, double a, const ImproperOptions& opts) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("improper integral needs a finite a >= 0");
  const double tol = std::max(opts.target_rel_tol, kTolFloor);
  const double x0 = std::max(1.0, 2.0 * a);
  // Pieces run tighter so their summed estimates fit the overall target.
  const double piece_tol = std::max(0.125 * tol, kTolFloor);

  QuadResult r = integrate_endpoint_singular(g, a, x0, piece_tol);
  if (opts.oscillation) {
    r += oscillatory_tail(g, *opts.oscillation, x0, piece_tol);
  } else {
    r += doubling_then_tail(g, x0, piece_tol);
  }
  const bool diverged = r.diverged;
  finalize(r, tol);
  r.diverged = diverged;
  if (diverged) r.converged = false;
  return r;
}

QuadResult integrate_improper(const Integrand& g, Domain domain, const ImproperOptions& opts) {
  if (domain == Domain::HalfLine) return integrate_from(g, 0.0, opts);
  auto folded = [&g](double x) { return g(x) + g(-x); };
  return integrate_from(folded, 0.0, opts);
}

std::string describe(const QuadResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << "value=" << r.value << " err=" << r.abs_error << " magnitude=" << r.magnitude
     << (r.converged ? " converged" : " not-converged") << (r.diverged ? " diverged" : "");
  return os.str();
}

}  // namespace ks::quad
