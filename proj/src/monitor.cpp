#include "curvflow/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include "json.hpp"

#include "curvflow/errors.hpp"
#include "curvflow/keyvalue.hpp"

namespace curvflow::monitor {

using flow::FlowState;
using sphere::ScalarField;

namespace {

double gk(const std::function<double(double)>& fn, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(fn, a, b, 15, 1e-13);
}

/// int_0^h ds / phi(s).
double inverse_phi_integral(const PhiSpec& phi, double h) {
  if (phi.kind() == PhiSpec::Kind::power) {
    const double p = phi.p();
    if (!(p > 0.0)) throw DomainError("int_0^h ds/phi diverges: integrand ~ s^" + std::to_string(p - 1.0));
    return std::pow(h, p) / p;
  }
  // Below the first sample the table is an exact power law s^mu0.
  const double s0 = phi.samples().front().first;
  const double mu0 = phi.mu(s0);
  if (!(mu0 < 1.0)) throw DomainError("int_0^h ds/phi diverges: integrand ~ s^" + std::to_string(-mu0));
  if (h <= s0) return h / (phi.value(h) * (1.0 - mu0));
  return s0 / (phi.value(s0) * (1.0 - mu0)) + gk([&](double s) { return 1.0 / phi.value(s); }, s0, h);
}

/// int_0^rho G(s) s^{n-1} ds.
double radial_G_integral(const GSpec& g, int n, double rho) {
  switch (g.kind()) {
    case GSpec::Kind::constant:
      return std::pow(rho, n) / n;
    case GSpec::Kind::radial_power: {
      const double q = g.q();
      if (!(q > 0.0)) throw DomainError("int_0^rho G s^(n-1) ds diverges: integrand ~ s^" + std::to_string(q - 1.0));
      return std::pow(rho, q) / q;
    }
    default: {
      const double s0 = g.samples().front().first;
      const double e = g.nu(s0) + n;
      if (!(e > 0.0)) throw DomainError("int_0^rho G s^(n-1) ds diverges: integrand ~ s^" + std::to_string(e - 1.0));
      if (rho <= s0) return std::pow(rho, n) * g.value(rho) / e;
      return std::pow(s0, n) * g.value(s0) / e +
             gk([&](double s) { return g.value(s) * std::pow(s, n - 1); }, s0, rho);
    }
  }
}

bool j_applies(const ProblemSpec& spec) { return spec.k == spec.n - 1; }

}  // namespace

double functional_J(const FlowState& state, const ProblemSpec& spec) {
  if (!j_applies(spec)) throw PreconditionError("J is defined for k = n-1 only");
  const std::size_t n = state.h.size();
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = state.h[i];
    const double rho = state.rho[i];
    a[i] = inverse_phi_integral(spec.phi, h) * spec.f[i];
    b[i] = radial_G_integral(spec.g, spec.n, rho) * h * state.sigma_k[i] / std::pow(rho, spec.n);
  }
  const sphere::SphericalGrid& g = state.h.grid();
  return sphere::integrate(g, a) - sphere::integrate(g, b);
}

double dJ_rate(const FlowState& state, const ProblemSpec& spec) {
  const std::size_t n = state.h.size();
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = state.h[i];
    v[i] = state.speed[i] * state.speed[i] * spec.f[i] / (spec.phi.value(h) * h);
  }
  return -sphere::integrate(state.h.grid(), v);
}

DecrementCheck decrement_refinement(const FlowState& state, const ProblemSpec& spec, double dt) {
  auto measure = [&](int substeps, double& decrement, double& predicted) {
    FlowState s = state;
    const double J0 = functional_J(s, spec);
    double rate = dJ_rate(s, spec);
    predicted = 0.0;
    for (int i = 0; i < substeps; ++i) {
      s = flow::advance(s, spec, dt / substeps);
      const double next = dJ_rate(s, spec);
      predicted += 0.5 * (rate + next) * dt / substeps;
      rate = next;
    }
    decrement = functional_J(s, spec) - J0;
  };
  DecrementCheck c;
  measure(1, c.decrement_dt, c.predicted_dt);
  measure(4, c.decrement_dt4, c.predicted_dt4);
  auto rel = [](double got, double want) { return want != 0.0 ? std::abs(got - want) / std::abs(want) : std::abs(got); };
  c.rel_error_dt = rel(c.decrement_dt, c.predicted_dt);
  c.rel_error_dt4 = rel(c.decrement_dt4, c.predicted_dt4);
  return c;
}

BoundsRecord bounds_snapshot(const FlowState& state, const ProblemSpec& spec) {
  BoundsRecord r;
  r.step = state.step;
  r.t = state.t;
  r.dt = state.dt_last;
  r.min_h = state.h.min();
  r.max_h = state.h.max();
  const sphere::Extrema ext = sphere::field_extrema(state.h, state.deriv);
  r.cont_min_h = ext.min;
  r.cont_max_h = ext.max;
  const ScalarField rho = sphere::support_to_radial(state.h);
  r.min_rho = rho.min();
  r.max_rho = rho.max();

  const std::size_t n = state.h.size();
  const int dim = state.h.grid().tangent_dim();
  r.min_sigma_k = r.min_p_over_h = std::numeric_limits<double>::infinity();
  r.max_sigma_k = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double g2 = 0.0;
    for (int a = 0; a < dim; ++a) g2 += state.deriv.grad[i][static_cast<std::size_t>(a)] * state.deriv.grad[i][static_cast<std::size_t>(a)];
    const double gh = std::sqrt(g2);
    r.max_grad_h = std::max(r.max_grad_h, gh);
    r.max_grad_rho = std::max(r.max_grad_rho, state.rho[i] * gh / state.h[i]);
    r.min_sigma_k = std::min(r.min_sigma_k, state.sigma_k[i]);
    r.max_sigma_k = std::max(r.max_sigma_k, state.sigma_k[i]);
    r.min_p_over_h = std::min(r.min_p_over_h, state.P[i] / state.h[i] - 1.0);
  }
  r.min_eig_w = state.min_eig_w;
  r.max_curvature = 1.0 / state.min_eig_w;
  r.residual = state.residual;
  if (j_applies(spec)) {
    r.J = functional_J(state, spec);
    r.dJ_rate = dJ_rate(state, spec);
  }
  return r;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::pass:
      return "pass";
    case Status::fail:
      return "fail";
    case Status::hypothesis_unmet:
      return "hypothesis unmet";
    case Status::not_applicable:
      return "not applicable";
    case Status::inconclusive:
      return "inconclusive";
    default:
      return "refused";
  }
}

Monitor::Monitor(const ProblemSpec& spec, MonitorOptions opts)
    : spec_(spec), opts_(opts), j_defined_(j_applies(spec)), hypotheses_(check_theorem1_conditions(spec)) {
  if (opts_.stride < 1) throw PreconditionError("monitor stride must be at least 1");
}

void Monitor::observe(const FlowState& state) {
  double sign = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.h.size(); ++i) sign = std::min(sign, state.P[i] / state.h[i] - 1.0);
  if (last_step_ < 0) sign_initial_ = sign;
  if (sign < sign_min_) {
    sign_min_ = sign;
    sign_min_step_ = state.step;
  }

  if (j_defined_) {
    const double J = functional_J(state, spec_);
    const double rate = dJ_rate(state, spec_);
    if (last_step_ < 0) {
      j_.J0 = J;
      // A near-stationary start has a decrement below roundoff; skip the refinement there.
      const double dt = flow::stable_dt(state, spec_, flow::StepControl{});
      if (std::abs(rate) * dt > 100.0 * 1e-8 * (1.0 + std::abs(J))) j_.refinement = decrement_refinement(state, spec_, dt);
    } else {
      const double increase = J - j_.prev_J;
      if (increase > j_.worst_increase) {
        j_.worst_increase = increase;
        j_.worst_increase_step = state.step;
      }
      // Per-step agreement with the rate formula, where the decrement is resolvable.
      const double predicted = 0.5 * (j_.prev_rate + rate) * state.dt_last;
      const double floor = 100.0 * 1e-8 * (1.0 + std::abs(j_.J0));
      if (std::abs(predicted) > floor) {
        const double err = std::abs(increase - predicted) / std::abs(predicted);
        ++j_.formula_steps;
        if (err > j_.worst_formula_error) {
          j_.worst_formula_error = err;
          j_.worst_formula_step = state.step;
        }
      }
    }
    j_.prev_J = J;
    j_.prev_rate = rate;
  }

  if (last_step_ < 0 || state.step % opts_.stride == 0) records_.push_back(bounds_snapshot(state, spec_));
  last_step_ = state.step;
}

void Monitor::finish(const FlowState& final_state) {
  if (records_.empty() || records_.back().step != final_state.step) {
    if (last_step_ != final_state.step) observe(final_state);
    if (records_.back().step != final_state.step) records_.push_back(bounds_snapshot(final_state, spec_));
  }
}

namespace {

template <class Get>
Verdict lower_bound_verdict(const std::string& name, const std::vector<BoundsRecord>& rec, Get get) {
  // Bound: 0.9 x min(initial, tail-half minimum).
  double tail = std::numeric_limits<double>::infinity();
  for (std::size_t i = rec.size() / 2; i < rec.size(); ++i) tail = std::min(tail, get(rec[i]));
  const double bound = 0.9 * std::min(get(rec.front()), tail);
  Verdict v{name, Status::pass, std::numeric_limits<double>::infinity(), 0, {}};
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const double m = (get(rec[i]) - bound) / std::abs(bound);
    if (m < v.worst_margin) {
      v.worst_margin = m;
      v.snapshot = i;
    }
  }
  if (v.worst_margin < 0.0) v.status = Status::fail;
  v.detail = "bound " + kv::format_real(bound);
  return v;
}

template <class Get>
Verdict upper_bound_verdict(const std::string& name, const std::vector<BoundsRecord>& rec, Get get) {
  // Bound: 1.1 x max(initial, tail-half maximum); absolute floor for quantities that vanish.
  double tail = 0.0;
  for (std::size_t i = rec.size() / 2; i < rec.size(); ++i) tail = std::max(tail, get(rec[i]));
  const double bound = 1.1 * std::max(get(rec.front()), tail) + 1e-12;
  Verdict v{name, Status::pass, std::numeric_limits<double>::infinity(), 0, {}};
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const double m = (bound - get(rec[i])) / bound;
    if (m < v.worst_margin) {
      v.worst_margin = m;
      v.snapshot = i;
    }
  }
  if (v.worst_margin < 0.0) v.status = Status::fail;
  v.detail = "bound " + kv::format_real(bound);
  return v;
}

}  // namespace

MonitorReport Monitor::report() const {
  MonitorReport rep;
  rep.records = records_;
  if (records_.empty()) return rep;
  const auto& rec = records_;
  auto& out = rep.verdicts;

  {
    Verdict v{"c0_rho_between_h", Status::pass, std::numeric_limits<double>::infinity(), 0, {}};
    for (std::size_t i = 0; i < rec.size(); ++i) {
      const double slack = opts_.rho_slack * rec[i].cont_max_h;
      const double m = std::min({rec[i].min_rho - rec[i].cont_min_h + slack, rec[i].max_rho - rec[i].min_rho,
                                 rec[i].cont_max_h - rec[i].max_rho + slack}) /
                       rec[i].cont_max_h;
      if (m < v.worst_margin) {
        v.worst_margin = m;
        v.snapshot = i;
      }
    }
    if (v.worst_margin < 0.0) v.status = Status::fail;
    v.detail = "min h <= min rho <= max rho <= max h, slack " + kv::format_real(opts_.rho_slack);
    out.push_back(v);
  }

  {
    Verdict v{"c0_bracket", Status::not_applicable, 0.0, 0, {}};
    if (const auto br = c0_bracket(spec_)) {
      // Barrier: extremes never pass the initial extremes or the bracket, whichever is wider.
      const double lo = std::min(rec.front().cont_min_h, br->lower) * (1.0 - 1e-9);
      const double hi = std::max(rec.front().cont_max_h, br->upper) * (1.0 + 1e-9);
      v.status = Status::pass;
      v.worst_margin = std::numeric_limits<double>::infinity();
      auto check = [&](std::size_t i, double l, double u) {
        const double m = std::min(rec[i].cont_min_h - l, u - rec[i].cont_max_h) / u;
        if (m < v.worst_margin) {
          v.worst_margin = m;
          v.snapshot = i;
        }
      };
      std::optional<std::size_t> entered;
      for (std::size_t i = 0; i < rec.size(); ++i) {
        check(i, lo, hi);
        if (!entered && rec[i].cont_min_h >= br->lower && rec[i].cont_max_h <= br->upper) entered = i;
        if (entered) check(i, 0.9 * br->lower, 1.1 * br->upper);
      }
      if (v.worst_margin < 0.0) v.status = Status::fail;
      v.detail = "bracket [" + kv::format_real(br->lower) + ", " + kv::format_real(br->upper) + "], " +
                 (entered ? "entered at snapshot " + std::to_string(*entered) : std::string("never entered"));
    } else {
      v.detail = scale_invariant(spec_) ? "scale-invariant data, no bracket" : "no crossing radii";
    }
    out.push_back(v);
  }

  out.push_back(upper_bound_verdict("c1_grad_h", rec, [](const BoundsRecord& r) { return r.max_grad_h; }));
  out.push_back(upper_bound_verdict("c1_grad_rho", rec, [](const BoundsRecord& r) { return r.max_grad_rho; }));
  out.push_back(lower_bound_verdict("sigma_k_lower", rec, [](const BoundsRecord& r) { return r.min_sigma_k; }));
  out.push_back(upper_bound_verdict("sigma_k_upper", rec, [](const BoundsRecord& r) { return r.max_sigma_k; }));
  {
    Verdict v = upper_bound_verdict("curvature_upper", rec, [](const BoundsRecord& r) { return r.max_curvature; });
    if (spec_.k < spec_.n - 1 && !hypotheses_.f_condition) {
      v.status = Status::hypothesis_unmet;
      v.detail += "; f-condition fails (min eigenvalue " + kv::format_real(hypotheses_.f_min_eigenvalue) + ")";
    }
    out.push_back(v);
  }

  {
    Verdict v{"sign_preservation", Status::pass, sign_min_ + 1e-10, 0, {}};
    auto idx = [&](long step) {
      std::size_t best = 0;
      for (std::size_t i = 0; i < rec.size(); ++i)
        if (rec[i].step <= step) best = i;
      return best;
    };
    v.snapshot = idx(sign_min_step_);
    v.detail = "min(P/h-1) = " + kv::format_real(sign_min_) + " at step " + std::to_string(sign_min_step_) +
               ", initially " + kv::format_real(sign_initial_);
    if (!hypotheses_.sign_condition) {
      v.status = Status::hypothesis_unmet;
    } else if (!(sign_initial_ > 0.0)) {
      v.status = Status::not_applicable;
    } else if (v.worst_margin <= 0.0) {
      v.status = Status::fail;
    }
    out.push_back(v);
  }

  if (j_defined_) {
    const double tol = 1e-8 * (1.0 + std::abs(j_.J0));
    Verdict mono{"J_monotone", Status::pass, 0.0, 0, {}};
    if (rec.size() > 1 || last_step_ > 0) {
      mono.worst_margin = tol - j_.worst_increase;
      for (std::size_t i = 0; i < rec.size(); ++i)
        if (rec[i].step <= j_.worst_increase_step) mono.snapshot = i;
      if (mono.worst_margin < 0.0) mono.status = Status::fail;
      mono.detail = "largest per-step increase " + kv::format_real(j_.worst_increase) + " at step " +
                    std::to_string(j_.worst_increase_step) + ", tolerance " + kv::format_real(tol);
    } else {
      mono.worst_margin = tol;
      mono.detail = "no steps taken";
    }
    out.push_back(mono);

    Verdict form{"J_decrement_formula", Status::pass, 0.1, 0, {}};
    if (j_.refinement) {
      const DecrementCheck& c = *j_.refinement;
      form.worst_margin = 0.1 - std::max(c.rel_error_dt4, j_.worst_formula_error);
      form.detail = "refinement rel error " + kv::format_real(c.rel_error_dt) + " (dt), " +
                    kv::format_real(c.rel_error_dt4) + " (dt/4); per-step worst " +
                    kv::format_real(j_.worst_formula_error) + " over " + std::to_string(j_.formula_steps) + " steps";
      if (form.worst_margin < 0.0) form.status = Status::fail;
    } else if (j_.formula_steps > 0) {
      form.worst_margin = 0.1 - j_.worst_formula_error;
      form.detail = "per-step worst " + kv::format_real(j_.worst_formula_error) + " over " +
                    std::to_string(j_.formula_steps) + " steps";
      if (form.worst_margin < 0.0) form.status = Status::fail;
    } else {
      form.status = Status::not_applicable;
      form.detail = "decrement below resolution (near-stationary run)";
    }
    out.push_back(form);
  }
  return rep;
}

bool MonitorReport::all_pass() const {
  if (uniqueness && uniqueness->status == Status::fail) return false;
  return std::none_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.status == Status::fail; });
}

const Verdict* MonitorReport::find(const std::string& name) const {
  for (const Verdict& v : verdicts)
    if (v.name == name) return &v;
  return nullptr;
}

std::string MonitorReport::to_json() const {
  nlohmann::ordered_json j;
  j["all_pass"] = all_pass();
  j["snapshots"] = records.size();
  if (!records.empty()) {
    const BoundsRecord& last = records.back();
    j["final"] = {{"step", last.step}, {"t", last.t}, {"residual", last.residual},
                  {"min_h", last.min_h}, {"max_h", last.max_h}};
    if (last.J) j["final"]["J"] = *last.J;
  }
  j["verdicts"] = nlohmann::ordered_json::array();
  for (const Verdict& v : verdicts) {
    nlohmann::ordered_json jv = {{"name", v.name}, {"status", to_string(v.status)}, {"snapshot", v.snapshot},
                                 {"detail", v.detail}};
    if (std::isfinite(v.worst_margin)) jv["worst_margin"] = v.worst_margin;
    j["verdicts"].push_back(jv);
  }
  if (uniqueness) {
    j["uniqueness"] = {{"status", to_string(uniqueness->status)},
                       {"max_distance", uniqueness->max_distance},
                       {"threshold", uniqueness->threshold},
                       {"gauge_warning", uniqueness->gauge_warning},
                       {"message", uniqueness->message}};
  }
  return j.dump(2);
}

void write_csv(std::ostream& out, const std::vector<BoundsRecord>& records) {
  out << "t,dt,min_h,max_h,max_|grad|,min_sigma_k,max_sigma_k,min_eig_w,max_eig_w^-1,residual,J\n";
  for (const BoundsRecord& r : records) {
    for (double v : {r.t, r.dt, r.min_h, r.max_h, r.max_grad_h, r.min_sigma_k, r.max_sigma_k, r.min_eig_w,
                     r.max_curvature, r.residual}) {
      out << kv::format_real(v) << ',';
    }
    if (r.J) out << kv::format_real(*r.J);
    out << '\n';
  }
}

std::string verdict_text(const MonitorReport& report) {
  std::ostringstream out;
  for (const Verdict& v : report.verdicts) {
    out << v.name << ": " << to_string(v.status) << "; worst margin "
        << (std::isfinite(v.worst_margin) ? kv::format_real(v.worst_margin) : std::string("inf")) << " at snapshot "
        << v.snapshot;
    if (!v.detail.empty()) out << "; " << v.detail;
    out << '\n';
  }
  if (report.uniqueness) {
    const UniquenessReport& u = *report.uniqueness;
    out << "uniqueness: " << to_string(u.status) << "; max distance " << kv::format_real(u.max_distance)
        << ", threshold " << kv::format_real(u.threshold);
    if (!u.message.empty()) out << "; " << u.message;
    out << '\n';
  }
  return out.str();
}

UniquenessReport uniqueness_experiment(const ProblemSpec& spec, const std::vector<ScalarField>& seeds,
                                       const flow::StepControl& ctl) {
  UniquenessReport rep;
  rep.threshold = 10.0 * ctl.tol_residual;
  if (scale_invariant(spec)) {
    rep.status = Status::refused;
    rep.gauge_warning = true;
    rep.message = "scale-invariant data: a one-parameter family of limits exists";
    return rep;
  }
  const UniquenessConditionReport cond = check_uniqueness_condition(spec);
  if (!cond.pass) {
    throw PreconditionError("uniqueness condition violated by " + kv::format_real(cond.worst_violation) +
                            " at m = " + kv::format_real(cond.m));
  }
  if (seeds.size() < 2) throw PreconditionError("uniqueness experiment needs at least two seeds");

  std::vector<std::future<flow::RunResult>> jobs;
  for (const ScalarField& seed : seeds) {
    jobs.push_back(std::async(std::launch::async, [&spec, &ctl, &seed] {
      flow::RunOptions opts;
      opts.keep_states = false;
      return flow::run(seed, spec, ctl, opts);
    }));
  }
  std::vector<flow::RunResult> results;
  for (auto& j : jobs) results.push_back(j.get());

  bool all = true;
  for (const auto& r : results) {
    rep.converged.push_back(r.report.converged);
    all = all && r.report.converged;
  }
  for (std::size_t a = 0; a < results.size(); ++a)
    for (std::size_t b = a + 1; b < results.size(); ++b) {
      const ScalarField& ha = results[a].final_state.h;
      const ScalarField& hb = results[b].final_state.h;
      for (std::size_t i = 0; i < ha.size(); ++i) rep.max_distance = std::max(rep.max_distance, std::abs(ha[i] - hb[i]));
    }
  if (!all) {
    rep.status = Status::inconclusive;
    rep.message = "not every seed converged";
  } else {
    rep.status = rep.max_distance < rep.threshold ? Status::pass : Status::fail;
  }
  return rep;
}

}  // namespace curvflow::monitor
