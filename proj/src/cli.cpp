#include "curvflow/cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include "curvflow/errors.hpp"
#include "curvflow/keyvalue.hpp"
#include "curvflow/monitor.hpp"
#include "curvflow/selftest.hpp"
#include "json.hpp"

namespace curvflow::cli {

namespace fs = std::filesystem;
using kv::format_real;

namespace {

struct Validation {
  bool required_pass = false;
  std::string failures;
};

Validation validate(const ProblemSpec& spec, std::ostream* out) {
  const AssumptionAReport a = check_assumption_A(spec);
  const Theorem1Report t = check_theorem1_conditions(spec);
  const bool f_required = spec.k < spec.n - 1;

  Validation v;
  v.required_pass = a.pass && (!f_required || t.f_condition);
  if (!a.pass) v.failures += "decay condition on phi*G; ";
  if (f_required && !t.f_condition) v.failures += "f-condition; ";

  if (out) {
    std::ostream& o = *out;
    o << "decay condition on phi*G: " << (a.pass ? "pass" : "fail") << " (eps near 0 = " << format_real(a.eps_low)
      << ", eps near inf = " << format_real(a.eps_high) << ", beta0 = " << format_real(a.beta0)
      << ", beta1 = " << format_real(a.beta1) << ")\n";
    if (!a.message.empty()) o << "  " << a.message << '\n';
    o << "mu nondecreasing: " << (t.mu_monotone ? "pass" : "fail") << '\n';
    o << "mu range [" << format_real(t.mu_min) << ", " << format_real(t.mu_max) << "] within [-vartheta,-1]: "
      << (t.mu_in_range ? "pass" : "fail") << '\n';
    o << "k + mu + nu < 0: " << (t.sign_condition ? "pass" : "fail") << " (max " << format_real(t.sign_max) << ")\n";
    o << "f-condition: " << (t.f_condition ? "pass" : "fail") << " (min eigenvalue " << format_real(t.f_min_eigenvalue)
      << " at node " << t.f_worst_node << ")" << (f_required ? "" : " [not required for k = n-1]") << '\n';
    for (const std::string& m : t.messages) o << "  " << m << '\n';
    if (spec.g.radial()) {
      const UniquenessConditionReport u = check_uniqueness_condition(spec);
      o << "uniqueness condition: " << (u.pass ? "pass" : "fail") << " (worst violation "
        << format_real(u.worst_violation) << " at m = " << format_real(u.m) << ")\n";
    }
    if (scale_invariant(spec)) o << "gauge warning: data are scale invariant, limits unique only up to scaling\n";
    if (const auto b = c0_bracket(spec)) {
      o << "C0 bracket: [" << format_real(b->lower) << ", " << format_real(b->upper) << "]\n";
    }
    o << "required validators: " << (v.required_pass ? "pass" : "fail") << '\n';
  }
  return v;
}

void write_values(const fs::path& path, const sphere::ScalarField& h) {
  std::ofstream f(path);
  const auto& g = h.grid();
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (int a = 0; a < g.dim(); ++a) f << format_real(g.node(i)[a]) << ' ';
    f << format_real(h[i]) << '\n';
  }
}

void dump_state(const fs::path& dir, const sphere::ScalarField& h, std::ostream& out) {
  try {
    std::ofstream f(dir / "final.snapshot");
    sphere::write_snapshot(f, h);
    out << "final state written to " << (dir / "final.snapshot").string() << '\n';
  } catch (const DegeneracyError&) {
    write_values(dir / "final_h.txt", h);
    out << "final support values written to " << (dir / "final_h.txt").string() << '\n';
  }
}

}  // namespace

RunConfig load_with_overrides(const std::string& path, const Overrides& o) {
  RunConfig c = load_config(path);
  if (o.stride) {
    if (*o.stride < 1) throw ParseError("--stride must be at least 1", 0, "--stride");
    c.output.stride = *o.stride;
  }
  if (o.out_dir) c.output.dir = *o.out_dir;
  if (o.seed) c.seed = *o.seed;
  return c;
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const auto grid = sphere::build_grid(cfg.problem.n, cfg.resolution);
  const ProblemSpec spec = make_problem(cfg.problem, grid);
  return validate(spec, &out).required_pass ? kOk : kFailed;
}

int cmd_run(const RunConfig& cfg, bool force, std::ostream& out) {
  const auto grid = sphere::build_grid(cfg.problem.n, cfg.resolution);
  const ProblemSpec spec = make_problem(cfg.problem, grid);
  const sphere::ScalarField h0 = make_initial(cfg, grid);

  const Validation v = validate(spec, nullptr);
  if (!v.required_pass && !force) {
    out << "validators failed (" << v.failures << "); rerun with --force to run anyway\n";
    return kFailed;
  }

  const fs::path dir(cfg.output.dir);
  fs::create_directories(dir);

  monitor::Monitor mon(spec, {cfg.output.stride});
  flow::RunOptions opts;
  opts.stride = cfg.output.stride;
  opts.keep_states = false;
  opts.observer = [&mon](const flow::FlowState& s) { mon.observe(s); };

  std::optional<flow::RunResult> run;
  try {
    run = flow::run(h0, spec, cfg.control, opts);
  } catch (const DegeneracyError& e) {
    out << "degenerate initial data: " << e.what() << '\n';
    dump_state(dir, h0, out);
    return kDegenerate;
  }
  const flow::RunResult& result = *run;
  mon.finish(result.final_state);
  const monitor::MonitorReport rep = mon.report();
  const flow::ConvergenceReport& conv = result.report;

  if (cfg.output.wants("csv")) {
    std::ofstream f(dir / "trajectory.csv");
    monitor::write_csv(f, rep.records);
  }
  if (cfg.output.wants("verdicts")) {
    std::ofstream f(dir / "verdicts.txt");
    f << monitor::verdict_text(rep);
  }
  if (cfg.output.wants("json")) {
    nlohmann::ordered_json j;
    j["converged"] = conv.converged;
    j["reason"] = flow::to_string(conv.reason);
    j["residual"] = conv.residual;
    j["steps"] = conv.steps;
    j["t"] = result.final_state.t;
    j["gauge_warning"] = conv.gauge_warning;
    if (!conv.message.empty()) j["message"] = conv.message;
    j["monitor"] = nlohmann::ordered_json::parse(rep.to_json());
    std::ofstream f(dir / "summary.json");
    f << j.dump(2) << '\n';
  }
  if (cfg.output.wants("snapshot") || conv.reason == flow::StopReason::degeneracy) {
    dump_state(dir, result.final_state.h, out);
  }

  out << "stopped: " << flow::to_string(conv.reason) << " after " << conv.steps << " steps, t = "
      << format_real(result.final_state.t) << ", residual = " << format_real(conv.residual) << '\n';
  if (conv.gauge_warning) out << "gauge warning: " << conv.message << '\n';
  out << monitor::verdict_text(rep);

  if (conv.reason == flow::StopReason::degeneracy) {
    out << "degeneracy: " << conv.message << '\n';
    return kDegenerate;
  }
  if (!conv.converged || !rep.all_pass()) return kFailed;
  return kOk;
}

int cmd_verify(const std::string& selector, std::uint64_t seed, std::ostream& out) {
  if (selector != "symfun" && selector != "sphere" && selector != "all") {
    out << "unknown selector '" << selector << "' (symfun, sphere, all)\n";
    return kBadInput;
  }
  std::vector<selftest::CheckResult> results;
  if (selector != "sphere") {
    auto r = selftest::symfun_suite(seed);
    results.insert(results.end(), r.begin(), r.end());
  }
  if (selector != "symfun") {
    auto r = selftest::sphere_suite(seed);
    results.insert(results.end(), r.begin(), r.end());
  }
  bool ok = true;
  for (const auto& r : results) {
    out << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.pass;
  }
  return ok ? kOk : kFailed;
}

int cmd_report(const std::string& dir, std::ostream& out) {
  const fs::path p = fs::path(dir) / "summary.json";
  std::ifstream f(p);
  if (!f) {
    out << "no summary.json in '" << dir << "'\n";
    return kBadInput;
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    out << "unreadable summary.json: " << e.what() << '\n';
    return kBadInput;
  }
  const bool converged = j.value("converged", false);
  const std::string reason = j.value("reason", std::string("unknown"));
  out << "converged: " << (converged ? "yes" : "no") << " (" << reason << ")\n";
  out << "steps: " << j.value("steps", 0L) << ", t = " << format_real(j.value("t", 0.0))
      << ", residual = " << format_real(j.value("residual", 0.0)) << '\n';
  if (j.value("gauge_warning", false)) out << "gauge warning\n";
  bool all_pass = true;
  if (j.contains("monitor")) {
    const auto& m = j["monitor"];
    all_pass = m.value("all_pass", false);
    for (const auto& v : m["verdicts"]) {
      out << "  " << v.value("name", std::string()) << ": " << v.value("status", std::string());
      if (v.contains("worst_margin")) out << " (margin " << format_real(v["worst_margin"].get<double>()) << ")";
      out << '\n';
    }
  }
  if (reason == "degeneracy") return kDegenerate;
  return converged && all_pass ? kOk : kFailed;
}

}  // namespace curvflow::cli
