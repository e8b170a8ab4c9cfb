#pragma once

// Explicit time integration of the support-function flow
//   h_t = (1/f) sigma_k(w) phi(h) h G(grad h + h x) - h.

#include <functional>
#include <string>
#include <vector>

#include "curvflow/problem.hpp"
#include "curvflow/sphere.hpp"

namespace curvflow::flow {

struct FlowState {
  explicit FlowState(sphere::ScalarField field) : h(std::move(field)) {}

  sphere::ScalarField h;
  double t = 0.0;
  double dt_last = 0.0;
  long step = 0;

  sphere::FrameDerivatives deriv;
  /// |grad h + h x| per node.
  std::vector<double> rho;
  std::vector<double> sigma_k;
  /// h phi(h) G / f.
  std::vector<double> theta;
  /// theta * sigma_k.
  std::vector<double> P;
  /// P - h.
  std::vector<double> speed;
  /// sup |P/h - 1|.
  double residual = 0.0;
  double min_eig_w = 0.0;
};

struct StepControl {
  double dt_init = 1e-3;
  double dt_min = 1e-12;
  double dt_max = 0.05;
  double safety = 0.5;
  double tol_residual = 1e-8;
  long max_steps = 200000;

  /// Throws PreconditionError unless 0 < dt_min <= dt_init <= dt_max and 0 < safety < 1.
  void validate() const;
  bool operator==(const StepControl&) const = default;
};

enum class StopReason { tolerance, max_steps, degeneracy };
const char* to_string(StopReason r);

struct ConvergenceReport {
  bool converged = false;
  double residual = 0.0;
  long steps = 0;
  StopReason reason = StopReason::max_steps;
  /// Data are scale invariant: balls of every radius are stationary up to a constant,
  /// so limits are only unique up to scaling.
  bool gauge_warning = false;
  std::string message;
};

/// Fills the cache. Throws DegeneracyError naming the worst node when h <= 0 or w is not
/// positive definite.
FlowState compute_speed(const sphere::ScalarField& h, const ProblemSpec& spec);

double residual(const FlowState& state, const ProblemSpec& spec);

/// safety * min(h/|speed|, 2 / (max ||theta sigma_k^{ij}|| * stiffness)), capped at dt_max.
double stable_dt(const FlowState& state, const ProblemSpec& spec, const StepControl& ctl);

/// One RK2 midpoint step of size dt (polar-filtered on S^2). Throws DegeneracyError.
FlowState advance(const FlowState& state, const ProblemSpec& spec, double dt);

/// One step at stable_dt (never more than twice the previous step, dt_init for the first),
/// halving on loss of convexity down to dt_min.
FlowState step(const FlowState& state, const ProblemSpec& spec, const StepControl& ctl);

struct RunOptions {
  /// Keep every stride-th state (and the final one) in the trajectory.
  long stride = 100;
  bool keep_states = true;
  /// Called on the initial state and after every accepted step.
  std::function<void(const FlowState&)> observer;
};

struct RunResult {
  std::vector<FlowState> trajectory;
  FlowState final_state;
  ConvergenceReport report;
};

/// Iterates step() until residual <= tol_residual or max_steps. Degeneracy ends the run
/// with reason == degeneracy and the last good state as final_state.
RunResult run(const sphere::ScalarField& h0, const ProblemSpec& spec, const StepControl& ctl,
              const RunOptions& opts = {});

struct IdentityCheck {
  double lhs = 0.0;  // finite-difference d/dt (rho^2/2), sup over nodes
  double rhs = 0.0;
  double abs_error = 0.0;
  /// abs_error / max(sup |rhs|, sup |lhs|); 0 when both sides vanish.
  double rel_error = 0.0;
};

/// Compares (rho^2/2)(h + dt speed) - (rho^2/2)(h), divided by dt, with
///   theta s^{ij} (rho^2/2)_ij + (k+1) h P - rho^2 + sigma_k grad h . grad theta - theta s^{ij} (w^2)_ij
/// at fixed x, where s^{ij} = sigma_k^{ij}(w).
IdentityCheck check_evolution_identity(const FlowState& state, const ProblemSpec& spec, double dt);

}  // namespace curvflow::flow
