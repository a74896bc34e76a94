#include <chrono>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ks/errors.hpp"
#include "ks/extended.hpp"
#include "ks/stieltjes.hpp"

using namespace ks;
using std::numbers::pi;

namespace {

double sgn(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

std::vector<double> symmetric_grid(int count, double lo, double hi) {
  std::vector<double> g;
  for (int i = 0; i < count / 2; ++i) {
    const double x = lo * std::pow(hi / lo, static_cast<double>(i) / (count / 2 - 1));
    g.push_back(x);
    g.push_back(-x);
  }
  return g;
}

}  // namespace

TEST_CASE("closed-form perturbations") {
  SUBCASE("odd normal power, cos and sin") {
    for (int n : {1, 2, 3}) {
      const double m = 2.0 * n + 1.0;
      const double beta = std::tan(pi / m);
      const auto c = build_class_real(make_odd_normal_power(n), PerturbationKind::CosH);
      const auto s = build_class_real(make_odd_normal_power(n), PerturbationKind::SinH);
      REQUIRE(c.perturbation().symbolic_phase());
      for (double t : symmetric_grid(10000, 1e-4, 1e4)) {
        const double a = std::pow(std::abs(t), 2.0 / m);
        const double hc = std::cos(sgn(t) * (pi * n / m + beta * a));
        const double hs = sgn(t) * std::sin(pi * n / m + beta * a);
        CHECK(std::abs(c.perturbation()(t) - hc) < 1e-12);
        CHECK(std::abs(s.perturbation()(t) - hs) < 1e-12);
        // Expanded form; cos(pi n/m) = sin(pi/(4n+2)).
        const double expanded = std::sin(pi / (4 * n + 2)) * std::cos(beta * a) -
                                std::cos(pi / (4 * n + 2)) * std::sin(beta * a);
        CHECK(std::abs(c.perturbation()(t) - expanded) < 1e-12);
        CHECK(std::abs(c.perturbation()(t)) <= 1.0);
        CHECK(std::abs(s.perturbation()(t)) <= 1.0);
      }
    }
  }
  SUBCASE("absolute normal power") {
    const double r = 6.0;
    const auto cls = build_class_halfline(make_abs_normal_power(r));
    CHECK(cls.perturbation().kind() == PerturbationKind::SinHe);
    for (double t : {1e-3, 0.5, 1.0, 7.0, 1e3}) {
      const double expected = std::sin((1.0 - 1.0 / r) * pi + std::tan(2.0 * pi / r) * std::pow(t, 2.0 / r));
      CHECK(std::abs(cls.perturbation()(t) - expected) < 1e-12);
    }
    CHECK(cls.perturbation()(-1.0) == 0.0);
  }
}

TEST_CASE("builder preconditions") {
  const Density normal =
      make_from_log_expr(Support::RealLine, LogDensityExpr(-0.5 * std::log(pi), 0.0, {{-1.0, 2.0}}));
  CHECK_THROWS_AS(build_class_real(normal, PerturbationKind::CosH), PreconditionError);
  CHECK_THROWS_AS(build_class_halfline(make_abs_normal_power(3.0)), PreconditionError);
  CHECK_THROWS_AS(build_class_halfline(make_abs_normal_power(4.0)), PreconditionError);
  CHECK_THROWS_AS(build_class_halfline(make_odd_normal_power(1)), DomainError);
  CHECK_THROWS_AS(build_class_real(make_abs_normal_power(6.0), PerturbationKind::CosH), DomainError);
  CHECK_THROWS_AS(build_class_real(make_odd_normal_power(1), PerturbationKind::SinHe), DomainError);
  // No moments at all.
  const Density cauchy = make_custom(
      Support::RealLine, [](double x) { return 1.0 / (pi * (1.0 + x * x)); }, std::nullopt, true);
  CHECK_THROWS_AS(build_class_real(cauchy, PerturbationKind::CosH), PreconditionError);
}

TEST_CASE("members") {
  const auto cls = build_class_real(make_odd_normal_power(1), PerturbationKind::CosH);
  SUBCASE("identity member") {
    const Density m0 = cls.member(0.0);
    for (double x : {-2.0, 0.3, 5.0}) CHECK(m0.eval(x) == cls.center().eval(x));
    CHECK(m0.family() == cls.center().family());
  }
  SUBCASE("out of range") {
    CHECK_THROWS_AS(cls.member(1.5), DomainError);
    CHECK_THROWS_AS(cls.member(-1.0000001), DomainError);
  }
  SUBCASE("extreme members are densities") {
    for (double eps : {-1.0, -0.5, 0.5, 1.0}) {
      const Density m = cls.member(eps);
      for (double x : symmetric_grid(2000, 1e-4, 1e4)) CHECK(m.eval(x) >= 0.0);
      const auto mass = total_mass(m, 1e-10);
      CHECK(mass.converged);
      CHECK(std::abs(mass.value - 1.0) <= 1e-7);
    }
  }
}

TEST_CASE("vanishing moments") {
  SUBCASE("order 0 only") {
    const auto rep = verify_moments(build_class_real(make_odd_normal_power(2), PerturbationKind::CosH), 0);
    CHECK(rep.pass);
    REQUIRE(rep.orders.size() == 1);
    CHECK(std::abs(rep.perturbation_integrals[0]) < 1e-9);
  }
  SUBCASE("odd normal power with cos") {
    const auto rep = verify_moments(build_class_real(make_odd_normal_power(1), PerturbationKind::CosH), 8);
    CHECK(rep.pass);
    for (std::size_t k = 0; k < rep.orders.size(); ++k) {
      CHECK(std::abs(rep.perturbation_integrals[k]) <= 1e-7 * std::max(1.0, rep.center_moments[k]));
      REQUIRE(rep.member_moments[k].size() == 4);
    }
  }
  SUBCASE("sin: even orders vanish by symmetry") {
    VerifyOptions o;
    o.check_members = false;
    o.allow_extended = false;
    const auto rep = verify_moments(build_class_real(make_odd_normal_power(2), PerturbationKind::SinH), 8, o);
    for (int k = 0; k <= 8; k += 2) CHECK(rep.perturbation_integrals[k] == 0.0);
  }
  SUBCASE("absolute normal power") {
    const auto rep = verify_moments(build_class_halfline(make_abs_normal_power(6.0)), 8);
    CHECK(rep.pass);
  }
}

TEST_CASE("double and quad-precision paths agree") {
  // The quad-precision integral is an independent oracle for the double
  // oscillatory quadrature on orders where double is sufficient.
  const Density f = make_abs_normal_power(6.0);
  const auto cls = build_class_halfline(f);
  VerifyOptions o;
  o.check_members = false;
  o.allow_extended = false;
  const auto rep = verify_moments(cls, 3, o);
  for (int k = 0; k <= 3; ++k) {
    extended::Integrand spec{*f.log_expr(), extended::PhaseRule::HalfLine, extended::Trig::Sin,
                             static_cast<double>(k), 0.0, 1.0};
    const auto hi = extended::integrate(spec);
    CHECK(hi.converged);
    CHECK(std::abs(hi.value) < 1e-20 * std::max(1.0, hi.magnitude));
    CHECK(std::abs(rep.perturbation_integrals[k] - hi.value) <= rep.error_estimates[k] + 1e-15);
  }
}

TEST_CASE("extended precision resolves cancellation beyond double") {
  VerifyOptions o;
  o.check_members = false;
  const auto rep =
      verify_moments(build_class_real(make_odd_normal_power(2), PerturbationKind::SinH), 7, o);
  CHECK(rep.methods[7] == "extended");
  CHECK(rep.statuses[7] == OrderStatus::Pass);
  CHECK(std::abs(rep.perturbation_integrals[7]) + rep.error_estimates[7] <= 1e-7);
  CHECK(rep.absolute_scales[7] > 1e13);

  o.allow_extended = false;
  const auto plain =
      verify_moments(build_class_real(make_odd_normal_power(2), PerturbationKind::SinH), 7, o);
  CHECK(plain.methods[7] == "double");
  CHECK(plain.statuses[7] != OrderStatus::Pass);
  CHECK_FALSE(plain.pass);
}

TEST_CASE("nonzero perturbation") {
  CHECK(verify_nonzero(build_class_real(make_odd_normal_power(1), PerturbationKind::CosH)));
  CHECK(verify_nonzero(build_class_halfline(make_abs_normal_power(6.0))));
  const StieltjesClass zero(make_odd_normal_power(1), Perturbation::custom([](double) { return 0.0; }));
  CHECK_FALSE(verify_nonzero(zero));
}

TEST_CASE("unbounded companion identity") {
  const auto rep = verify_unbounded_companion(make_abs_normal_power(6.0), 4);
  CHECK(rep.pass);
  CHECK(rep.orders.size() == 5);
  CHECK(rep.member_moments.empty());
}

TEST_CASE("numeric phase matches the closed form") {
  const Density f1 = make_odd_normal_power(1);
  const Density numeric = make_custom(
      Support::RealLine, [f1](double x) { return f1.eval(x); }, std::nullopt, true,
      [f1](double x) { return f1.log_density(x); });
  const auto num = build_class_real(numeric, PerturbationKind::CosH, 2);
  const auto sym = build_class_real(f1, PerturbationKind::CosH, 2);
  CHECK_FALSE(num.perturbation().symbolic_phase());
  for (double t : {-3.0, -0.5, 0.7, 2.0}) {
    CHECK(std::abs(num.perturbation().phase(t) - sym.perturbation().phase(t)) < 1e-6);
  }
}

TEST_CASE("serial and parallel reports match") {
  const auto cls = build_class_real(make_odd_normal_power(1), PerturbationKind::CosH);
  VerifyOptions serial;
  serial.exec = Exec::Serial;
  const auto a = verify_moments(cls, 4, serial);
  const auto b = verify_moments(cls, 4);
  CHECK(a.perturbation_integrals == b.perturbation_integrals);
  CHECK(a.error_estimates == b.error_estimates);
  CHECK(a.member_moments == b.member_moments);
}
