#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ks/errors.hpp"
#include "ks/quadrature.hpp"

using namespace ks::quad;
using std::numbers::pi;

TEST_CASE("finite adaptive rule") {
  const auto r = integrate([](double x) { return std::sin(x); }, 0.0, pi);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(r.magnitude == doctest::Approx(2.0).epsilon(1e-13));

  // Reversed bounds flip the sign.
  const auto rev = integrate([](double x) { return std::sin(x); }, pi, 0.0);
  CHECK(rev.value == doctest::Approx(-2.0).epsilon(1e-13));
}

TEST_CASE("endpoint singular rule") {
  const auto p = integrate_endpoint_singular([](double x) { return std::pow(x, -0.8); }, 0.0, 1.0,
                                             1e-12);
  CHECK(p.converged);
  CHECK(std::abs(p.value - 5.0) < 1e-9);
  const auto l = integrate_endpoint_singular([](double x) { return std::log(x); }, 0.0, 1.0, 1e-12);
  CHECK(std::abs(l.value + 1.0) < 1e-12);
}

TEST_CASE("pv_integrate examples") {
  const auto params = PVParams::defaults_for(1.0);
  auto one = [](double) { return 1.0; };

  SUBCASE("symmetric interval cancels exactly") {
    const auto r = pv_integrate(one, 1.0, {-1.0, 3.0}, params);
    CHECK(r.converged);
    CHECK(r.value == 0.0);
  }
  SUBCASE("asymmetric interval") {
    // -ln|1-x| evaluated as a symmetric limit: ln 2.
    const auto r = pv_integrate(one, 1.0, {-1.0, 2.0}, params);
    CHECK(std::abs(r.value - std::log(2.0)) < 1e-10);
  }
  SUBCASE("linear numerator") {
    // x/(1-x) = -1 + 1/(1-x); the PV of the second part on [0,2] vanishes.
    const auto r = pv_integrate([](double x) { return x; }, 1.0, {0.0, 2.0}, params);
    CHECK(std::abs(r.value + 2.0) < 1e-10);
  }
  SUBCASE("evaluation point outside the domain is an ordinary integral") {
    const auto r = pv_integrate(one, 2.0, {0.0, 1.0}, PVParams::defaults_for(2.0));
    CHECK(std::abs(r.value - std::log(2.0)) < 1e-11);
  }
  SUBCASE("boundary point is rejected") {
    CHECK_THROWS_AS(pv_integrate(one, 2.0, {-1.0, 2.0}, params), ks::DomainError);
  }
  SUBCASE("bad parameters are rejected") {
    PVParams bad = params;
    bad.panel_order = 4;
    CHECK_THROWS_AS(pv_integrate(one, 1.0, {0.0, 3.0}, bad), ks::DomainError);
    bad = params;
    bad.excision_radius = 0.0;
    CHECK_THROWS_AS(pv_integrate(one, 1.0, {0.0, 3.0}, bad), ks::DomainError);
  }
}

TEST_CASE("pv_integrate is linear") {
  auto g1 = [](double x) { return std::exp(-x) * std::cos(3.0 * x); };
  auto g2 = [](double x) { return std::sqrt(x); };
  const double alpha = 0.7, beta = -2.5;
  const auto params = PVParams::defaults_for(0.8);
  const Interval dom{0.0, 3.0};
  const auto r1 = pv_integrate(g1, 0.8, dom, params);
  const auto r2 = pv_integrate(g2, 0.8, dom, params);
  const auto rc =
      pv_integrate([&](double x) { return alpha * g1(x) + beta * g2(x); }, 0.8, dom, params);
  const double bound = std::abs(alpha) * r1.abs_error + std::abs(beta) * r2.abs_error + rc.abs_error;
  CHECK(std::abs(rc.value - (alpha * r1.value + beta * r2.value)) <= bound + 1e-14);
}

TEST_CASE("pv_integrate refinement stays within the error estimate") {
  auto g = [](double x) { return std::log(x) / (1.3 + x); };  // singular endpoint at 0
  const double t = 1.3;
  PVParams base = PVParams::defaults_for(t);
  const auto r0 = pv_integrate(g, t, {0.0, 2.6}, base);
  REQUIRE(r0.converged);

  PVParams halved = base;
  halved.excision_radius *= 0.5;
  const auto r1 = pv_integrate(g, t, {0.0, 2.6}, halved);
  CHECK(std::abs(r1.value - r0.value) < r0.abs_error);

  PVParams doubled = base;
  doubled.panel_order *= 2;
  const auto r2 = pv_integrate(g, t, {0.0, 2.6}, doubled);
  CHECK(std::abs(r2.value - r0.value) < r0.abs_error);
}

TEST_CASE("integrate_improper examples") {
  SUBCASE("exponential") {
    const auto r = integrate_improper([](double x) { return std::exp(-x); }, Domain::HalfLine);
    CHECK(r.converged);
    CHECK(std::abs(r.value - 1.0) < 1e-10);
  }
  SUBCASE("Cauchy kernel") {
    const auto r =
        integrate_improper([](double x) { return 1.0 / (1.0 + x * x); }, Domain::RealLine);
    CHECK(r.converged);
    CHECK(std::abs(r.value - pi) < 1e-10);
  }
  SUBCASE("non-integrable tail is flagged as diverged") {
    const auto r =
        integrate_improper([](double x) { return x * x / (1.0 + x * x); }, Domain::RealLine);
    CHECK(r.diverged);
    CHECK_FALSE(r.converged);
  }
  SUBCASE("logarithmic divergence is flagged too") {
    const auto r = integrate_improper([](double x) { return x / (1.0 + x * x); }, Domain::HalfLine);
    CHECK(r.diverged);
  }
  SUBCASE("slow algebraic decay converges") {
    // integral_0^inf x^{0.8 - 2} ... use x^{0.8}/(1+x^2) = (pi/2)/cos(0.4 pi)
    const auto r = integrate_improper([](double x) { return std::pow(x, 0.8) / (1.0 + x * x); },
                                      Domain::HalfLine, {1e-11, std::nullopt});
    CHECK(r.converged);
    CHECK(std::abs(r.value - 0.5 * pi / std::cos(0.4 * pi)) < 1e-9);
  }
}

TEST_CASE("absolute moments of N(0,1/2)") {
  for (int p = 0; p <= 4; ++p) {
    auto g = [p](double x) { return std::pow(std::abs(x), p) * std::exp(-x * x) / std::sqrt(pi); };
    const auto r = integrate_improper(g, Domain::RealLine, {1e-11, std::nullopt});
    const double expected = std::tgamma(0.5 * (p + 1)) / std::sqrt(pi);
    CHECK(r.converged);
    CHECK(std::abs(r.value - expected) <= 1e-9 * expected);
  }
}

TEST_CASE("oscillatory lobes with acceleration") {
  SUBCASE("Dirichlet integral is only conditionally convergent") {
    ImproperOptions opts{1e-9, Oscillation{[](double x) { return x; }, 0.0}};
    auto g = [](double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; };
    const auto r = integrate_improper(g, Domain::HalfLine, opts);
    CHECK(std::abs(r.value - pi / 2) < 1e-8);
  }
  SUBCASE("damped cosine") {
    ImproperOptions opts{1e-11, Oscillation{[](double x) { return 4.0 * x; }, pi / 2}};
    auto g = [](double x) { return std::exp(-x) * std::cos(4.0 * x); };
    const auto r = integrate_improper(g, Domain::HalfLine, opts);
    CHECK(r.converged);
    CHECK(std::abs(r.value - 1.0 / 17.0) < 1e-12);
  }
  SUBCASE("stretched-exponential damping with growing phase") {
    // integral_0^inf exp(-sqrt x) cos(sqrt x) dx = 2 Re integral s e^{-(1-i)s} ds = 2 Re 1/(1-i)^2 = 0
    ImproperOptions opts{1e-11, Oscillation{[](double x) { return std::sqrt(x); }, pi / 2}};
    auto g = [](double x) { return std::exp(-std::sqrt(x)) * std::cos(std::sqrt(x)); };
    const auto r = integrate_improper(g, Domain::HalfLine, opts);
    CHECK(r.converged);
    CHECK(std::abs(r.value) < 1e-10 * r.magnitude);
  }
}

TEST_CASE("wynn epsilon accelerates an alternating series") {
  std::vector<double> sums;
  double s = 0.0;
  for (int k = 1; k <= 21; ++k) {
    s += (k % 2 == 1 ? 1.0 : -1.0) / k;
    sums.push_back(s);
  }
  double err = 0.0;
  const double est = wynn_epsilon(sums, &err);
  CHECK(std::abs(est - std::log(2.0)) < 1e-12);
  CHECK(std::abs(sums.back() - std::log(2.0)) > 1e-3);
}
