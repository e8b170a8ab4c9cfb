#pragma once

// Run configuration: problem keys plus grid, initial data, step control and outputs.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "curvflow/flow.hpp"
#include "curvflow/problem.hpp"
#include "curvflow/sphere.hpp"

namespace curvflow {

struct InitialSpec {
  enum class Kind { round, harmonic_perturbation, from_snapshot };
  Kind kind = Kind::round;
  /// round: h = c.
  double c = 1.0;
  /// harmonic-perturbation: h = base (1 + sum of terms).
  double base = 1.0;
  std::vector<MonomialTerm> terms;
  /// from-snapshot: file written by write_snapshot on the same grid.
  std::string path;
  /// Amplitude of an extra seeded perturbation by random linear and quadratic monomials.
  double noise = 0.0;
  bool operator==(const InitialSpec&) const = default;
};

struct OutputSpec {
  std::string dir = "out";
  long stride = 100;
  /// Any of csv, verdicts, json, snapshot.
  std::vector<std::string> formats{"csv", "verdicts", "json", "snapshot"};
  bool wants(const std::string& format) const;
  bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
  ProblemDefinition problem;
  sphere::Resolution resolution{1, 128};
  InitialSpec initial;
  flow::StepControl control;
  OutputSpec output;
  std::uint64_t seed = 0;
  bool operator==(const RunConfig&) const = default;
};

/// Throws ParseError with line and field on malformed input.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);
/// Canonical text; parse_config_text(serialize_config(c)) == c bit for bit.
std::string serialize_config(const RunConfig& cfg);

/// Initial support function on the config's grid. The seeded noise is applied here.
sphere::ScalarField make_initial(const RunConfig& cfg, const sphere::GridPtr& grid);

}  // namespace curvflow
