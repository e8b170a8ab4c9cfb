#include "curvflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curvflow/errors.hpp"

namespace curvflow::flow {

using sphere::ScalarField;
using symfun::SymMatrix;

void StepControl::validate() const {
  if (!(0.0 < dt_min && dt_min <= dt_init && dt_init <= dt_max)) {
    throw PreconditionError("step control needs 0 < dt_min <= dt_init <= dt_max");
  }
  if (!(0.0 < safety && safety < 1.0)) throw PreconditionError("step control needs 0 < safety < 1");
  if (!(tol_residual > 0.0)) throw PreconditionError("tol_residual must be positive");
  if (max_steps < 0) throw PreconditionError("max_steps must be non-negative");
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::tolerance:
      return "tolerance";
    case StopReason::max_steps:
      return "max_steps";
    default:
      return "degeneracy";
  }
}

namespace {

Vec3 position(const sphere::SphericalGrid& g, std::size_t i, double h, const std::array<double, 2>& grad) {
  Vec3 X = g.node(i) * h;
  for (int a = 0; a < g.tangent_dim(); ++a) X = X + g.frame(i, a) * grad[static_cast<std::size_t>(a)];
  return X;
}

}  // namespace

FlowState compute_speed(const ScalarField& h, const ProblemSpec& spec) {
  const sphere::SphericalGrid& g = h.grid();
  const std::size_t n = h.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(h[i] > 0.0)) {
      std::size_t worst = 0;
      for (std::size_t j = 1; j < n; ++j)
        if (h[j] < h[worst]) worst = j;
      throw DegeneracyError("support function not positive: h = " + std::to_string(h[worst]) + " at node " +
                                std::to_string(worst),
                            worst, h[worst]);
    }
  }

  FlowState s(h);
  s.deriv = sphere::grad_hess(h);
  s.rho.resize(n);
  s.sigma_k.resize(n);
  s.theta.resize(n);
  s.P.resize(n);
  s.speed.resize(n);

  s.min_eig_w = std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = s.deriv.w[i].min_eigenvalue();
    if (e < s.min_eig_w) {
      s.min_eig_w = e;
      worst = i;
    }
  }
  if (!(s.min_eig_w > 0.0)) {
    throw DegeneracyError("convexity lost: min eigenvalue of w = " + std::to_string(s.min_eig_w) + " at node " +
                              std::to_string(worst),
                          worst, s.min_eig_w);
  }

  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double hi = h[i];
    s.rho[i] = norm(position(g, i, hi, s.deriv.grad[i]));
    s.sigma_k[i] = symfun::sigma_k_matrix(s.deriv.w[i], spec.k);
    s.theta[i] = hi * spec.phi.value(hi) * spec.g.value(s.rho[i]) / spec.f[i];
    s.P[i] = s.theta[i] * s.sigma_k[i];
    s.speed[i] = s.P[i] - hi;
    res = std::max(res, std::abs(s.P[i] / hi - 1.0));
  }
  if (!std::isfinite(res)) throw DegeneracyError("non-finite speed", 0, res);
  s.residual = res;
  return s;
}

double residual(const FlowState& state, const ProblemSpec&) {
  double res = 0.0;
  for (std::size_t i = 0; i < state.P.size(); ++i) res = std::max(res, std::abs(state.P[i] / state.h[i] - 1.0));
  return res;
}

double stable_dt(const FlowState& state, const ProblemSpec& spec, const StepControl& ctl) {
  double symbol = 0.0;
  double rate = 0.0;
  for (std::size_t i = 0; i < state.h.size(); ++i) {
    const SymMatrix a = symfun::sigma_k_grad(state.deriv.w[i], spec.k) * state.theta[i];
    symbol = std::max(symbol, std::abs(a.max_eigenvalue()));
    rate = std::max(rate, std::abs(state.speed[i]) / state.h[i]);
  }
  double dt = ctl.dt_max;
  if (symbol > 0.0) dt = std::min(dt, ctl.safety * 2.0 / (symbol * state.h.grid().laplacian_stiffness()));
  if (rate > 0.0) dt = std::min(dt, ctl.safety / rate);
  return dt;
}

namespace {

ScalarField euler(const FlowState& base, const FlowState& slope, double dt) {
  std::vector<double> v(base.h.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = base.h[i] + dt * slope.speed[i];
  if (base.h.grid().dim() == 3) sphere::apply_polar_filter(base.h.grid(), v);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw DegeneracyError("non-finite support value", i, v[i]);
  }
  return ScalarField(base.h.grid_ptr(), std::move(v));
}

}  // namespace

FlowState advance(const FlowState& state, const ProblemSpec& spec, double dt) {
  const FlowState mid = compute_speed(euler(state, state, 0.5 * dt), spec);
  FlowState next = compute_speed(euler(state, mid, dt), spec);
  next.t = state.t + dt;
  next.dt_last = dt;
  next.step = state.step + 1;
  return next;
}

FlowState step(const FlowState& state, const ProblemSpec& spec, const StepControl& ctl) {
  double dt = stable_dt(state, spec, ctl);
  dt = std::min(dt, state.step == 0 ? ctl.dt_init : 2.0 * state.dt_last);
  for (;;) {
    try {
      return advance(state, spec, dt);
    } catch (const DegeneracyError&) {
      dt *= 0.5;
      if (dt < ctl.dt_min) throw;
    }
  }
}

RunResult run(const ScalarField& h0, const ProblemSpec& spec, const StepControl& ctl, const RunOptions& opts) {
  ctl.validate();
  if (opts.stride < 1) throw PreconditionError("stride must be at least 1");
  RunResult out{{}, compute_speed(h0, spec), {}};
  if (h0.grid().dim() == 3) {
    std::vector<double> v(h0.values().begin(), h0.values().end());
    sphere::apply_polar_filter(h0.grid(), v);
    out.final_state = compute_speed(ScalarField(h0.grid_ptr(), std::move(v)), spec);
  }
  ConvergenceReport& rep = out.report;
  rep.gauge_warning = scale_invariant(spec);
  if (rep.gauge_warning) rep.message = "scale-invariant data: limits are unique only up to scaling";

  FlowState& cur = out.final_state;
  if (opts.observer) opts.observer(cur);
  if (opts.keep_states) out.trajectory.push_back(cur);

  for (;;) {
    if (cur.residual <= ctl.tol_residual) {
      rep.reason = StopReason::tolerance;
      rep.converged = true;
      break;
    }
    if (cur.step >= ctl.max_steps) {
      rep.reason = StopReason::max_steps;
      break;
    }
    try {
      cur = step(cur, spec, ctl);
    } catch (const DegeneracyError& e) {
      rep.reason = StopReason::degeneracy;
      rep.message = e.what();
      break;
    }
    if (opts.observer) opts.observer(cur);
    if (opts.keep_states && cur.step % opts.stride == 0) out.trajectory.push_back(cur);
  }
  if (opts.keep_states && out.trajectory.back().step != cur.step) out.trajectory.push_back(cur);
  rep.residual = cur.residual;
  rep.steps = cur.step;
  return out;
}

IdentityCheck check_evolution_identity(const FlowState& state, const ProblemSpec& spec, double dt) {
  const sphere::SphericalGrid& g = state.h.grid();
  const std::size_t n = state.h.size();
  const int dim = g.tangent_dim();

  auto half_rho_sq = [&](const ScalarField& h, const sphere::FrameDerivatives& d) {
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = h[i] * h[i];
      for (int a = 0; a < dim; ++a) s += d.grad[i][static_cast<std::size_t>(a)] * d.grad[i][static_cast<std::size_t>(a)];
      q[i] = 0.5 * s;
    }
    return q;
  };

  const std::vector<double> q0 = half_rho_sq(state.h, state.deriv);
  std::vector<double> h1(n);
  for (std::size_t i = 0; i < n; ++i) h1[i] = state.h[i] + dt * state.speed[i];
  const ScalarField h1f(state.h.grid_ptr(), std::move(h1));
  const std::vector<double> q1 = half_rho_sq(h1f, sphere::grad_hess(h1f));

  const sphere::FrameDerivatives dq = sphere::grad_hess(ScalarField(state.h.grid_ptr(), q0));
  const sphere::FrameDerivatives dtheta = sphere::grad_hess(ScalarField(state.h.grid_ptr(), state.theta));

  IdentityCheck c;
  double lhs_max = 0.0, rhs_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const SymMatrix& w = state.deriv.w[i];
    const SymMatrix sij = symfun::sigma_k_grad(w, spec.k);
    double grad_dot = 0.0;
    for (int a = 0; a < dim; ++a) {
      grad_dot += state.deriv.grad[i][static_cast<std::size_t>(a)] * dtheta.grad[i][static_cast<std::size_t>(a)];
    }
    const double th = state.theta[i];
    const double rhs = th * symfun::contract(sij, dq.hess[i]) + (spec.k + 1) * state.h[i] * state.P[i] -
                       2.0 * q0[i] + state.sigma_k[i] * grad_dot - th * symfun::contract(sij, w.squared());
    const double lhs = (q1[i] - q0[i]) / dt;
    c.abs_error = std::max(c.abs_error, std::abs(lhs - rhs));
    if (std::abs(lhs) > lhs_max) {
      lhs_max = std::abs(lhs);
      c.lhs = lhs;
    }
    if (std::abs(rhs) > rhs_max) {
      rhs_max = std::abs(rhs);
      c.rhs = rhs;
    }
  }
  const double scale = std::max(lhs_max, rhs_max);
  c.rel_error = scale > 0.0 ? c.abs_error / scale : 0.0;
  return c;
}

}  // namespace curvflow::flow
