#include "curvflow/config.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "curvflow/errors.hpp"
#include "curvflow/keyvalue.hpp"

namespace curvflow {

bool OutputSpec::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

namespace {

sphere::Resolution parse_resolution(const kv::Entry& e, int n) {
  const auto x = e.value.find('x');
  sphere::Resolution r;
  if (x == std::string::npos) {
    if (n != 2) throw ParseError("line " + std::to_string(e.line) + ": S^2 grids need 'NLATxNLON'", e.line, "grid.resolution");
    r.nlat = 1;
    r.nlon = static_cast<int>(kv::parse_integer(e.value, e.line, "grid.resolution"));
  } else {
    if (n != 3) throw ParseError("line " + std::to_string(e.line) + ": S^1 grids take a single count", e.line, "grid.resolution");
    r.nlat = static_cast<int>(kv::parse_integer(e.value.substr(0, x), e.line, "grid.resolution"));
    r.nlon = static_cast<int>(kv::parse_integer(e.value.substr(x + 1), e.line, "grid.resolution"));
  }
  return r;
}

std::vector<std::string> parse_formats(const kv::Entry& e) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(e.value);
  while (std::getline(in, cur, ',')) {
    cur.erase(0, cur.find_first_not_of(' '));
    cur.erase(cur.find_last_not_of(' ') + 1);
    if (cur != "csv" && cur != "verdicts" && cur != "json" && cur != "snapshot") {
      throw ParseError("line " + std::to_string(e.line) + ": unknown output format '" + cur + "'", e.line,
                       "output.formats");
    }
    out.push_back(cur);
  }
  return out;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  kv::Reader r(in);
  RunConfig c;
  c.problem = kv::read_problem(r);
  c.resolution = parse_resolution(r.require("grid.resolution"), c.problem.n);

  // Without initial.* keys the flow starts from the unit ball.
  const kv::Entry kind = r.has("initial.kind") ? r.require("initial.kind") : kv::Entry{"round", 0};
  if (kind.value == "round") {
    c.initial.kind = InitialSpec::Kind::round;
    c.initial.c = r.real_or("initial.c", 1.0);
  } else if (kind.value == "harmonic-perturbation") {
    c.initial.kind = InitialSpec::Kind::harmonic_perturbation;
    c.initial.base = r.real_or("initial.base", 1.0);
    c.initial.terms = kv::parse_terms(r.require("initial.terms"), "initial.terms");
  } else if (kind.value == "from-snapshot") {
    c.initial.kind = InitialSpec::Kind::from_snapshot;
    c.initial.path = r.text("initial.path");
  } else {
    throw ParseError("line " + std::to_string(kind.line) + ": initial.kind must be round, harmonic-perturbation or from-snapshot",
                     kind.line, "initial.kind");
  }
  c.initial.noise = r.real_or("initial.noise", 0.0);

  flow::StepControl& s = c.control;
  s.dt_init = r.real_or("control.dt_init", s.dt_init);
  s.dt_min = r.real_or("control.dt_min", s.dt_min);
  s.dt_max = r.real_or("control.dt_max", s.dt_max);
  s.safety = r.real_or("control.safety", s.safety);
  s.tol_residual = r.real_or("control.tol_residual", s.tol_residual);
  s.max_steps = r.integer_or("control.max_steps", s.max_steps);
  try {
    s.validate();
  } catch (const PreconditionError& e) {
    throw ParseError(e.what(), 0, "control");
  }

  c.output.dir = r.text_or("output.dir", c.output.dir);
  c.output.stride = r.integer_or("output.stride", c.output.stride);
  if (c.output.stride < 1) throw ParseError("output.stride must be at least 1", 0, "output.stride");
  if (auto f = r.take("output.formats")) c.output.formats = parse_formats(*f);

  const long long seed = r.integer_or("seed", 0);
  if (seed < 0) throw ParseError("seed must be non-negative", 0, "seed");
  c.seed = static_cast<std::uint64_t>(seed);
  r.finish();
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path + "'", 0, "config");
  return parse_config(in);
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  kv::write_problem(out, c.problem);
  out << "grid.resolution = ";
  if (c.problem.n == 2) {
    out << c.resolution.nlon << '\n';
  } else {
    out << c.resolution.nlat << 'x' << c.resolution.nlon << '\n';
  }
  switch (c.initial.kind) {
    case InitialSpec::Kind::round:
      out << "initial.kind = round\ninitial.c = " << kv::format_real(c.initial.c) << '\n';
      break;
    case InitialSpec::Kind::harmonic_perturbation:
      out << "initial.kind = harmonic-perturbation\ninitial.base = " << kv::format_real(c.initial.base)
          << "\ninitial.terms = " << kv::format_terms(c.initial.terms) << '\n';
      break;
    case InitialSpec::Kind::from_snapshot:
      out << "initial.kind = from-snapshot\ninitial.path = " << c.initial.path << '\n';
      break;
  }
  out << "initial.noise = " << kv::format_real(c.initial.noise) << '\n';
  const flow::StepControl& s = c.control;
  out << "control.dt_init = " << kv::format_real(s.dt_init) << '\n'
      << "control.dt_min = " << kv::format_real(s.dt_min) << '\n'
      << "control.dt_max = " << kv::format_real(s.dt_max) << '\n'
      << "control.safety = " << kv::format_real(s.safety) << '\n'
      << "control.tol_residual = " << kv::format_real(s.tol_residual) << '\n'
      << "control.max_steps = " << s.max_steps << '\n';
  out << "output.dir = " << c.output.dir << '\n' << "output.stride = " << c.output.stride << '\n' << "output.formats = ";
  for (std::size_t i = 0; i < c.output.formats.size(); ++i) out << (i ? ", " : "") << c.output.formats[i];
  out << '\n' << "seed = " << c.seed << '\n';
  return out.str();
}

sphere::ScalarField make_initial(const RunConfig& cfg, const sphere::GridPtr& grid) {
  std::vector<double> v(grid->size());
  switch (cfg.initial.kind) {
    case InitialSpec::Kind::round:
      std::fill(v.begin(), v.end(), cfg.initial.c);
      break;
    case InitialSpec::Kind::harmonic_perturbation: {
      const FieldExpr e{FieldExpr::Kind::harmonic_perturbation, cfg.initial.base, cfg.initial.terms};
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = e(grid->node(i));
      break;
    }
    case InitialSpec::Kind::from_snapshot: {
      std::ifstream in(cfg.initial.path);
      if (!in) throw DataError("cannot open snapshot '" + cfg.initial.path + "'");
      const sphere::ScalarField h = sphere::read_snapshot(in, grid);
      v.assign(h.values().begin(), h.values().end());
      break;
    }
  }
  if (cfg.initial.noise != 0.0) {
    // Fixed draw order: 3 linear then 6 quadratic coefficients.
    std::mt19937_64 rng(cfg.seed);
    auto draw = [&] { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; };
    std::array<double, 3> lin{};
    std::array<double, 6> quad{};
    for (double& a : lin) a = draw();
    for (double& a : quad) a = draw();
    const int dim = grid->dim();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec3& x = grid->node(i);
      double p = 0.0;
      int q = 0;
      for (int a = 0; a < dim; ++a) {
        p += lin[static_cast<std::size_t>(a)] * x[a];
        for (int b = a; b < dim; ++b) p += quad[static_cast<std::size_t>(q++)] * x[a] * x[b];
      }
      v[i] *= 1.0 + cfg.initial.noise * p;
    }
  }
  return sphere::ScalarField(grid, std::move(v));
}

}  // namespace curvflow
