#pragma once

// Property suites behind `curvflow verify`.

#include <cstdint>
#include <string>
#include <vector>

namespace curvflow::selftest {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Symmetric-function identities, derivative checks, Newton-Maclaurin, concavity.
std::vector<CheckResult> symfun_suite(std::uint64_t seed);
/// Quadrature, covariant derivative convergence order, support/radial round trips.
std::vector<CheckResult> sphere_suite(std::uint64_t seed);

}  // namespace curvflow::selftest
