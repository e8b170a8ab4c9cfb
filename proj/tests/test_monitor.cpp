#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "curvflow/errors.hpp"
#include "curvflow/monitor.hpp"
#include "oracles.hpp"

using namespace curvflow;
using namespace curvflow::monitor;
using oracle::pi;

namespace {

ProblemSpec circle_spec(double p, int nlon = 64, bool radial_g = false) {
  ProblemDefinition d;
  d.n = 2;
  d.k = 1;
  d.phi = PhiSpec::power(p);
  if (radial_g) d.g = GSpec::radial_power(2.0, 2);
  d.vartheta = 2.0;
  return make_problem(d, sphere::build_grid(2, {1, nlon}));
}

flow::FlowState state_of(const ProblemSpec& s, const std::function<double(const Vec3&)>& fn) {
  return flow::compute_speed(sphere::ScalarField::from_function(s.f.grid_ptr(), fn), s);
}

}  // namespace

TEST_SUITE("monitor") {

TEST_CASE("functional J in closed form") {
  const ProblemSpec p2 = circle_spec(2.0, 64, true);
  CHECK(std::abs(functional_J(state_of(p2, [](const Vec3&) { return 1.0; }), p2)) < 1e-13);
  CHECK(std::abs(functional_J(state_of(p2, [](const Vec3&) { return 2.0; }), p2)) < 1e-12);
  const ProblemSpec p3 = circle_spec(3.0, 64, true);
  CHECK(functional_J(state_of(p3, [](const Vec3&) { return 1.0; }), p3) == doctest::Approx(-pi / 3).epsilon(1e-13));
  CHECK(std::abs(dJ_rate(state_of(p3, [](const Vec3&) { return 1.0; }), p3)) < 1e-14);

  ProblemDefinition d;
  d.n = 3;
  d.k = 1;
  const ProblemSpec s = make_problem(d, sphere::build_grid(3, {8, 16}));
  CHECK_THROWS_AS(functional_J(flow::compute_speed(sphere::ScalarField::constant(s.f.grid_ptr(), 1.0), s), s),
                  PreconditionError);
}

TEST_CASE("J on a ball equals its closed form for p = 3") {
  // int_0^h s^2 ds = h^3/3 and int_0^h s ds = h^2/2 on a ball of radius h.
  const ProblemSpec s = circle_spec(3.0, 32);
  for (double h : {0.5, 1.3, 2.0}) {
    const double J = functional_J(state_of(s, [h](const Vec3&) { return h; }), s);
    CHECK(J == doctest::Approx(2 * pi * (h * h * h / 3 - h * h / 2)).epsilon(1e-12));
  }
}

TEST_CASE("J decreases at the rate formula") {
  const ProblemSpec s = circle_spec(3.0, 64);
  const flow::FlowState st = state_of(s, [](const Vec3& x) { return 1 + 0.05 * x.x; });
  CHECK(dJ_rate(st, s) < 0.0);
  const DecrementCheck c = decrement_refinement(st, s, 0.02);
  CHECK(c.decrement_dt < 0.0);
  CHECK(c.rel_error_dt < 0.1);
  CHECK(c.rel_error_dt4 < c.rel_error_dt);
}

TEST_CASE("bounds snapshot") {
  const ProblemSpec s = circle_spec(2.0, 64);
  const BoundsRecord u = bounds_snapshot(state_of(s, [](const Vec3&) { return 1.0; }), s);
  CHECK(u.min_h == 1.0);
  CHECK(u.max_h == 1.0);
  CHECK(u.max_grad_h < 1e-14);
  CHECK(u.min_sigma_k == doctest::Approx(1.0));
  CHECK(u.max_curvature == doctest::Approx(1.0));

  const BoundsRecord b = bounds_snapshot(state_of(s, [](const Vec3& x) { return 2 + x.x; }), s);
  CHECK(b.min_h == doctest::Approx(1.0));
  CHECK(b.max_h == doctest::Approx(3.0));
  CHECK(b.min_sigma_k == doctest::Approx(2.0));
  CHECK(b.max_sigma_k == doctest::Approx(2.0));
  CHECK(b.max_curvature == doctest::Approx(0.5));
  CHECK(b.min_rho >= b.cont_min_h - 1e-9);
  CHECK(b.max_rho <= b.cont_max_h + 1e-9);
}

TEST_CASE("monitor verdicts on a perturbed circle") {
  const ProblemSpec s = circle_spec(3.0, 64);
  Monitor mon(s, {50});
  flow::RunOptions opts;
  opts.keep_states = false;
  opts.observer = [&mon](const flow::FlowState& st) { mon.observe(st); };
  const flow::RunResult r = flow::run(sphere::ScalarField::from_function(s.f.grid_ptr(), [](const Vec3& x) {
                                        return 1 + 0.05 * x.x;
                                      }),
                                      s, flow::StepControl{}, opts);
  mon.finish(r.final_state);
  const MonitorReport rep = mon.report();
  CHECK(rep.all_pass());
  for (const char* name : {"c0_rho_between_h", "J_monotone", "J_decrement_formula", "sigma_k_lower", "c1_grad_h"}) {
    CAPTURE(name);
    const Verdict* v = rep.find(name);
    REQUIRE(v != nullptr);
    CHECK(v->status == Status::pass);
  }
  CHECK(rep.records.back().step == r.final_state.step);
  CHECK(rep.records.front().J.has_value());

  std::ostringstream csv;
  write_csv(csv, rep.records);
  const std::string text = csv.str();
  CHECK(text.rfind("t,dt,min_h,max_h,max_|grad|,min_sigma_k,max_sigma_k,min_eig_w,max_eig_w^-1,residual,J\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == rep.records.size() + 1);
  CHECK(rep.to_json().find("\"verdicts\"") != std::string::npos);
}

TEST_CASE("uniqueness experiment") {
  flow::StepControl ctl;
  ctl.tol_residual = 1e-9;
  const ProblemSpec s = circle_spec(3.0, 32);
  const auto g = s.f.grid_ptr();
  const std::vector<sphere::ScalarField> seeds{
      sphere::ScalarField::constant(g, 0.8), sphere::ScalarField::constant(g, 1.3),
      sphere::ScalarField::from_function(g, [](const Vec3& x) { return 1 + 0.05 * x.x; }),
      sphere::ScalarField::from_function(g, [](const Vec3& x) { return 1 - 0.05 * x.x; })};
  const UniquenessReport u = uniqueness_experiment(s, seeds, ctl);
  CHECK(u.status == Status::pass);
  CHECK(u.max_distance < 10 * ctl.tol_residual);
  CHECK_FALSE(u.gauge_warning);

  const ProblemSpec gauge = circle_spec(2.0, 32);
  const UniquenessReport refused = uniqueness_experiment(gauge, seeds, ctl);
  CHECK(refused.status == Status::refused);
  CHECK(refused.gauge_warning);

  ProblemDefinition d;
  d.n = 3;
  d.k = 2;
  d.phi = PhiSpec::power(2.0);
  const ProblemSpec bad = make_problem(d, sphere::build_grid(3, {8, 16}));
  CHECK_THROWS_AS(uniqueness_experiment(bad, {sphere::ScalarField::constant(bad.f.grid_ptr(), 1.0)}, ctl),
                  PreconditionError);
}

}  // TEST_SUITE
