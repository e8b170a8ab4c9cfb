#pragma once

// Run-time checks of the a-priori bounds along a flow, the monotone functional J for
// k = n-1, and multi-seed uniqueness experiments.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "curvflow/flow.hpp"
#include "curvflow/problem.hpp"

namespace curvflow::monitor {

struct BoundsRecord {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  /// Nodal extremes of h.
  double min_h = 0.0;
  double max_h = 0.0;
  /// Extremes of the interpolated h (used against rho).
  double cont_min_h = 0.0;
  double cont_max_h = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
  double max_grad_h = 0.0;
  /// rho |grad h| / h at corresponding points.
  double max_grad_rho = 0.0;
  double min_sigma_k = 0.0;
  double max_sigma_k = 0.0;
  double min_eig_w = 0.0;
  /// Largest principal curvature, 1 / min_eig_w.
  double max_curvature = 0.0;
  /// min over nodes of P/h - 1.
  double min_p_over_h = 0.0;
  double residual = 0.0;
  std::optional<double> J;
  std::optional<double> dJ_rate;
};

BoundsRecord bounds_snapshot(const flow::FlowState& state, const ProblemSpec& spec);

/// J = int (int_0^h ds/phi) f dx - int (int_0^rho G s^{n-1} ds) du, k = n-1 only.
/// The second integral is pulled back to the support parametrisation through the Gauss map
/// (du = h sigma_{n-1}(w) / |X|^n dx), so it uses the same nodes as the first.
/// Throws DomainError when an inner integral diverges at 0.
double functional_J(const flow::FlowState& state, const ProblemSpec& spec);

/// -int (P - h)^2 f / (phi(h) h) dx.
double dJ_rate(const flow::FlowState& state, const ProblemSpec& spec);

struct DecrementCheck {
  double decrement_dt = 0.0;
  double predicted_dt = 0.0;
  double rel_error_dt = 0.0;
  double decrement_dt4 = 0.0;
  double predicted_dt4 = 0.0;
  double rel_error_dt4 = 0.0;
};

/// J(after) - J(before) against the trapezoid rule on dJ_rate, over one step of dt and
/// over four steps of dt/4.
DecrementCheck decrement_refinement(const flow::FlowState& state, const ProblemSpec& spec, double dt);

enum class Status { pass, fail, hypothesis_unmet, not_applicable, inconclusive, refused };
const char* to_string(Status s);

struct Verdict {
  std::string name;
  Status status = Status::pass;
  /// Positive: inside the bound by this much (relative unless stated in detail).
  double worst_margin = 0.0;
  /// Index into MonitorReport::records.
  std::size_t snapshot = 0;
  std::string detail;
};

struct UniquenessReport {
  Status status = Status::inconclusive;
  double max_distance = 0.0;
  double threshold = 0.0;
  std::vector<bool> converged;
  bool gauge_warning = false;
  std::string message;
};

struct MonitorReport {
  std::vector<BoundsRecord> records;
  std::vector<Verdict> verdicts;
  std::optional<UniquenessReport> uniqueness;

  /// No verdict is fail.
  bool all_pass() const;
  const Verdict* find(const std::string& name) const;
  std::string to_json() const;
};

struct MonitorOptions {
  long stride = 100;
  /// Relative slack on min h <= rho <= max h for interpolation error.
  double rho_slack = 1e-6;
};

/// Consumes states in step order. Records a snapshot every stride steps; J and the sign of
/// P/h - 1 are tracked on every observed step.
class Monitor {
 public:
  Monitor(const ProblemSpec& spec, MonitorOptions opts = {});

  void observe(const flow::FlowState& state);
  /// Records the final state if it was not already a snapshot.
  void finish(const flow::FlowState& final_state);
  MonitorReport report() const;

  const std::vector<BoundsRecord>& records() const { return records_; }

 private:
  ProblemSpec spec_;
  MonitorOptions opts_;
  bool j_defined_;
  std::vector<BoundsRecord> records_;
  long last_step_ = -1;

  struct JTrack {
    double J0 = 0.0;
    double prev_J = 0.0;
    double prev_rate = 0.0;
    double worst_increase = -1e300;
    long worst_increase_step = 0;
    double worst_formula_error = 0.0;
    long worst_formula_step = 0;
    long formula_steps = 0;
    std::optional<DecrementCheck> refinement;
  } j_;

  Theorem1Report hypotheses_;
  double sign_initial_ = 0.0;
  double sign_min_ = 1e300;
  long sign_min_step_ = 0;
};

/// Fixed CSV header and one row per record; numbers in shortest round-trip form.
void write_csv(std::ostream& out, const std::vector<BoundsRecord>& records);
std::string verdict_text(const MonitorReport& report);

/// Runs the flow from every seed in parallel and compares the limits in sup norm.
/// Refuses (status refused, gauge_warning) on scale-invariant data; throws PreconditionError
/// when the uniqueness condition fails.
UniquenessReport uniqueness_experiment(const ProblemSpec& spec, const std::vector<sphere::ScalarField>& seeds,
                                       const flow::StepControl& ctl);

}  // namespace curvflow::monitor
