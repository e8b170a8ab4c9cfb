#include <cmath>

#include "doctest.h"
#include "curvflow/errors.hpp"
#include "curvflow/problem.hpp"
#include "oracles.hpp"

using namespace curvflow;

namespace {

ProblemDefinition power_problem(int n, int k, double p, double vartheta = 2.0) {
  ProblemDefinition d;
  d.n = n;
  d.k = k;
  d.phi = PhiSpec::power(p);
  d.vartheta = vartheta;
  return d;
}

sphere::GridPtr grid_for(int n) { return n == 2 ? sphere::build_grid(2, {1, 64}) : sphere::build_grid(3, {24, 48}); }

ProblemSpec spec_of(const ProblemDefinition& d) { return make_problem(d, grid_for(d.n)); }

}  // namespace

TEST_SUITE("problem") {

TEST_CASE("phi and G") {
  const PhiSpec phi = PhiSpec::power(3.0);
  CHECK(phi.value(2.0) == doctest::Approx(0.25));
  CHECK(phi.mu(0.7) == doctest::Approx(-2.0));
  CHECK(phi.derivative(2.0) == doctest::Approx(-2.0 / 8.0));

  const GSpec g = GSpec::radial_power(2.0, 3);
  CHECK(g.value(2.0) == doctest::Approx(0.5));
  CHECK(g.nu(1.3) == doctest::Approx(-1.0));
  const Vec3 y{0.3, -0.4, 1.2};
  const Vec3 grad = g.gradient(y);
  const double fd = oracle::central_difference([&](double t) { return g.value(Vec3{0.3 + t, -0.4, 1.2}); }, 0.0, 1e-6);
  CHECK(grad.x == doctest::Approx(fd).epsilon(1e-7));
  CHECK(GSpec::constant().value(5.0) == 1.0);

  // A table sampled from a power law reproduces it.
  std::vector<std::pair<double, double>> t;
  for (double s = 0.001; s < 2000; s *= 2) t.emplace_back(s, std::pow(s, -2.0));
  const PhiSpec tab = PhiSpec::table(t);
  CHECK(tab.value(0.37) == doctest::Approx(std::pow(0.37, -2.0)).epsilon(1e-10));
  CHECK(tab.mu(3.1) == doctest::Approx(-2.0).epsilon(1e-8));
  CHECK_THROWS_AS(PhiSpec::table({{1.0, 1.0}, {2.0, -1.0}, {3.0, 1.0}}), DataError);
}

TEST_CASE("make_problem validates its input") {
  CHECK_THROWS_AS(spec_of(power_problem(2, 2, 3)), DomainError);
  CHECK_THROWS_AS(spec_of(power_problem(3, 0, 3)), DomainError);
  CHECK_THROWS_AS(spec_of(power_problem(2, 1, 3, 0.0)), DomainError);
  ProblemDefinition d = power_problem(2, 1, 3);
  d.f.base = -1.0;
  CHECK_THROWS(spec_of(d));
}

TEST_CASE("decay condition on phi*G") {
  for (int k : {1, 2}) {
    const AssumptionAReport a = check_assumption_A(spec_of(power_problem(3, k, k + 2)));
    CHECK(a.pass);
    CHECK(a.eps_low == doctest::Approx(1.0));
    CHECK(a.eps_high == doctest::Approx(1.0));
    const AssumptionAReport b = check_assumption_A(spec_of(power_problem(3, k, k + 1)));
    CHECK_FALSE(b.pass);
    CHECK(std::abs(b.eps_low) < 1e-12);
  }
  // phi = s^-k e^-s: superpolynomial decay at infinity, exactly s^-k at zero.
  std::vector<std::pair<double, double>> t;
  for (double s = 1e-4; s < 300; s *= 1.5) t.emplace_back(s, std::pow(s, -1.0) * std::exp(-s));
  ProblemDefinition d = power_problem(2, 1, 3);
  d.phi = PhiSpec::table(t);
  const AssumptionAReport c = check_assumption_A(spec_of(d));
  CHECK(c.pass_high);
  CHECK_FALSE(c.pass_low);
}

TEST_CASE("existence hypotheses") {
  ProblemDefinition d = power_problem(3, 1, 3, 2.0);
  d.f.base = 2.0;
  const Theorem1Report r = check_theorem1_conditions(spec_of(d));
  CHECK(r.pass);
  CHECK(r.mu_monotone);
  CHECK(r.mu_in_range);
  CHECK(r.sign_condition);
  CHECK(r.f_min_eigenvalue == doctest::Approx(2.0 * std::pow(2.0, -1.0 / 3.0)).epsilon(1e-10));

  const Theorem1Report low = check_theorem1_conditions(spec_of(power_problem(2, 1, 1.5)));
  CHECK_FALSE(low.mu_in_range);
  CHECK_FALSE(low.pass);

  // f = 1 + a x3 against the axisymmetric finite-difference oracle, for a mild and a steep tilt.
  for (double a : {0.1, 0.9}) {
    ProblemDefinition tilted = power_problem(3, 1, 3, 2.0);
    tilted.f.kind = FieldExpr::Kind::harmonic_perturbation;
    tilted.f.terms = {MonomialTerm{a, {0, 0, 1}}};
    const ProblemSpec spec = spec_of(tilted);
    const std::vector<double> eig = f_condition_eigenvalues(spec);
    const auto& g = spec.f.grid();
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double ref = oracle::axisymmetric_f_condition([&](double th) { return 1 + a * std::cos(th); }, 1, 2.0, g.theta(i));
      worst = std::max(worst, std::abs(eig[i] - ref) / std::max(1.0, std::abs(ref)));
    }
    // Steep near the south pole for a = 0.9, where the grid error dominates.
    CHECK(worst < (a < 0.5 ? 1e-5 : 0.05));
    const Theorem1Report t = check_theorem1_conditions(spec);
    CHECK(t.f_condition == (a < 0.5));
  }
}

TEST_CASE("uniqueness condition") {
  CHECK(check_uniqueness_condition(spec_of(power_problem(2, 1, 2))).pass);
  const UniquenessConditionReport strict = check_uniqueness_condition(spec_of(power_problem(2, 1, 3)));
  CHECK(strict.pass);
  CHECK(strict.worst_violation <= 0.0);
  CHECK_FALSE(check_uniqueness_condition(spec_of(power_problem(3, 2, 2))).pass);
}

TEST_CASE("scale invariance and the C0 bracket") {
  CHECK(scale_invariant(spec_of(power_problem(2, 1, 2))));
  CHECK_FALSE(scale_invariant(spec_of(power_problem(2, 1, 3))));
  CHECK_FALSE(c0_bracket(spec_of(power_problem(2, 1, 2))).has_value());

  // C(n-1,k) s^k s^(1-p) = f crosses at s = C/f for p = k + 2.
  ProblemDefinition d = power_problem(3, 1, 3);
  d.f.kind = FieldExpr::Kind::harmonic_perturbation;
  d.f.base = 2.0;
  d.f.terms = {MonomialTerm{0.1, {0, 0, 1}}};
  const ProblemSpec spec = spec_of(d);
  const auto b = c0_bracket(spec);
  REQUIRE(b.has_value());
  CHECK(b->lower == doctest::Approx(2.0 / spec.f.max()).epsilon(1e-9));
  CHECK(b->upper == doctest::Approx(2.0 / spec.f.min()).epsilon(1e-9));
  CHECK(round_speed_factor(spec, 0.5) == doctest::Approx(2.0 * 0.5 * 4.0));
}

TEST_CASE("problem files") {
  ProblemDefinition d = power_problem(3, 2, 3.5, 2.5);
  d.g = GSpec::radial_power(2.5, 3);
  d.f.kind = FieldExpr::Kind::harmonic_perturbation;
  d.f.base = 1.25;
  d.f.terms = {MonomialTerm{0.1, {0, 0, 1}}, MonomialTerm{-0.05, {2, 1, 0}}};
  CHECK(parse_problem_text(serialize_problem(d)) == d);

  ProblemDefinition t;
  t.phi = PhiSpec::table({{0.1, 100.0}, {1.0, 1.0}, {10.0, 0.01}});
  t.g = GSpec::radial_table({{0.1, 2.0}, {1.0, 1.0}, {10.0, 0.5}});
  CHECK(parse_problem_text(serialize_problem(t)) == t);

  CHECK_THROWS_AS(parse_problem_text("n = 2\nk = 1\n"), ParseError);
  try {
    parse_problem_text("n = 2\nk = 1\nphi.kind = power\nphi.p = abc\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.field() == "phi.p");
    CHECK(e.line() == 4);
  }
}

}  // TEST_SUITE
