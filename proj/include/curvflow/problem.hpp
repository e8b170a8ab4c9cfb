#pragma once

// Data (phi, G, f) of a flow problem and validators for the structural hypotheses
// the long-time existence and uniqueness results rely on.

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "curvflow/sphere.hpp"
#include "curvflow/spline.hpp"

namespace curvflow {

/// phi : (0, inf) -> (0, inf).
class PhiSpec {
 public:
  enum class Kind { power, table };

  /// phi(s) = s^(1-p).
  static PhiSpec power(double p);
  /// Log-log cubic spline through (s, phi(s)) samples.
  static PhiSpec table(std::vector<std::pair<double, double>> samples);

  Kind kind() const noexcept { return kind_; }
  double p() const noexcept { return p_; }
  const std::vector<std::pair<double, double>>& samples() const { return table_.samples(); }

  double value(double s) const;
  double derivative(double s) const;
  /// mu(s) = s (log phi)'(s).
  double mu(double s) const;
  /// d mu / ds.
  double mu_derivative(double s) const;

  bool operator==(const PhiSpec& o) const;

 private:
  Kind kind_ = Kind::power;
  double p_ = 0.0;
  LogLogTable table_;
};

/// Radial G(y) = G(|y|) on R^n \ {0}; the tangential-gradient condition holds by construction.
class GSpec {
 public:
  enum class Kind { constant, radial_power, radial_table };

  static GSpec constant();
  /// G(y) = |y|^(q-n).
  static GSpec radial_power(double q, int n);
  static GSpec radial_table(std::vector<std::pair<double, double>> samples);

  Kind kind() const noexcept { return kind_; }
  double q() const noexcept { return q_; }
  int ambient() const noexcept { return n_; }
  const std::vector<std::pair<double, double>>& samples() const { return table_.samples(); }

  /// G at |y| = r.
  double value(double r) const;
  double value(const Vec3& y) const { return value(norm(y)); }
  /// Euclidean gradient, G'(|y|) y / |y|.
  Vec3 gradient(const Vec3& y) const;
  /// grad G(y) . y / G(y) as a function of r = |y|.
  double nu(double r) const;
  bool radial() const noexcept { return true; }

  bool operator==(const GSpec& o) const;

 private:
  Kind kind_ = Kind::constant;
  double q_ = 0.0;
  int n_ = 0;
  LogLogTable table_;
};

/// One Cartesian monomial term coef * x1^a x2^b x3^c.
struct MonomialTerm {
  double coef = 0.0;
  std::array<int, 3> powers{};
  bool operator==(const MonomialTerm&) const = default;
};

/// base * (1 + sum of terms); "constant" when there are no terms.
struct FieldExpr {
  enum class Kind { constant, harmonic_perturbation };
  Kind kind = Kind::constant;
  double base = 1.0;
  std::vector<MonomialTerm> terms;

  double operator()(const Vec3& x) const;
  bool operator==(const FieldExpr&) const = default;
};

/// Everything a problem definition file carries.
struct ProblemDefinition {
  int n = 2;
  int k = 1;
  PhiSpec phi = PhiSpec::power(2.0);
  GSpec g = GSpec::constant();
  FieldExpr f;
  double vartheta = 1.0;
  bool operator==(const ProblemDefinition&) const = default;
};

/// A problem materialised on a grid.
struct ProblemSpec {
  int n = 2;
  int k = 1;
  PhiSpec phi;
  GSpec g;
  sphere::ScalarField f;
  double vartheta = 1.0;
  /// Fixed to 1: stationary points solve phi(h) G sigma_k = f.
  double gamma = 1.0;
};

/// Validates n, k, vartheta and f > 0. Throws DomainError / DataError.
ProblemSpec make_problem(const ProblemDefinition& def, sphere::GridPtr grid);

/// C(n-1, k) s^k phi(s) G(s): the stationary speed factor P/h * f on a ball of radius s.
double round_speed_factor(const ProblemSpec& spec, double s);

struct AssumptionAReport {
  double eps_low = 0.0;
  double eps_high = 0.0;
  double beta0 = 0.0;
  double beta1 = 0.0;
  bool pass_low = false;
  bool pass_high = false;
  bool pass = false;
  std::string message;
};

/// Fits the log-log decay exponent of phi*G on the outer half-decades of [s_lo, s_hi].
/// An end passes when its eps is at least eps_min.
AssumptionAReport check_assumption_A(const ProblemSpec& spec, double s_lo = 0.01, double s_hi = 100.0,
                                     double eps_min = 0.05);

struct Theorem1Report {
  bool mu_monotone = false;
  double worst_mu_decrease = 0.0;
  bool mu_in_range = false;
  double mu_min = 0.0;
  double mu_max = 0.0;
  bool sign_condition = false;
  /// max over samples of k + mu(s) + grad G . y / G.
  double sign_max = 0.0;
  bool f_condition = false;
  double f_min_eigenvalue = 0.0;
  std::size_t f_worst_node = 0;
  bool pass = false;
  std::vector<std::string> messages;
};

Theorem1Report check_theorem1_conditions(const ProblemSpec& spec, double s_lo = 0.01, double s_hi = 100.0,
                                         int samples = 400);

/// Minimum eigenvalue field of (k+1) g I + (k+vartheta) hess g, g = f^{-1/(k+vartheta)}.
std::vector<double> f_condition_eigenvalues(const ProblemSpec& spec);

struct UniquenessConditionReport {
  bool pass = false;
  double worst_violation = 0.0;
  double m = 1.0;
  double s1 = 0.0;
  double s2 = 0.0;
};

/// phi(m s1) G(m s2) <= phi(s1) G(s2) m^-k over a lattice in m in [1, m_max], s1, s2 in [s_lo, s_hi].
UniquenessConditionReport check_uniqueness_condition(const ProblemSpec& spec, int m_samples = 40,
                                                     int s_samples = 40, double m_max = 100.0,
                                                     double s_lo = 0.01, double s_hi = 100.0);

/// True when s^k phi(s) G(s) is scale invariant, i.e. k + mu(s) + nu(s) == 0 on the validator range:
/// balls of every radius then solve the same equation up to one constant.
bool scale_invariant(const ProblemSpec& spec, double s_lo = 0.01, double s_hi = 100.0);

struct C0Bracket {
  double lower = 0.0;
  double upper = 0.0;
};

/// Radii where C(n-1,k) s^k phi(s) G(s) crosses max f (lower) and min f (upper).
std::optional<C0Bracket> c0_bracket(const ProblemSpec& spec);

// Problem definition files: "key = value" lines.
ProblemDefinition parse_problem(std::istream& in);
ProblemDefinition parse_problem_text(const std::string& text);
std::string serialize_problem(const ProblemDefinition& def);

}  // namespace curvflow
