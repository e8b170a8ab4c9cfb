#pragma once

// Subcommands of the `curvflow` executable. Exit codes: 0 ok, 1 hypothesis failure, failed
// monitor or no convergence, 2 degeneracy, 3 unusable config or files.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "curvflow/config.hpp"

namespace curvflow::cli {

inline constexpr int kOk = 0;
inline constexpr int kFailed = 1;
inline constexpr int kDegenerate = 2;
inline constexpr int kBadInput = 3;

/// Prints the validator reports. 0 iff the required validators for this k pass.
int cmd_check(const RunConfig& cfg, std::ostream& out);

/// Runs the flow with monitors and writes the requested outputs to cfg.output.dir.
int cmd_run(const RunConfig& cfg, bool force, std::ostream& out);

/// selector: symfun, sphere or all.
int cmd_verify(const std::string& selector, std::uint64_t seed, std::ostream& out);

/// Summarises the outputs of an earlier run in `dir`.
int cmd_report(const std::string& dir, std::ostream& out);

struct Overrides {
  std::optional<long> stride;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
};

/// Loads a config and applies command-line overrides.
RunConfig load_with_overrides(const std::string& path, const Overrides& o);

}  // namespace curvflow::cli
