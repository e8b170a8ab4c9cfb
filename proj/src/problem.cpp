#include "curvflow/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curvflow/errors.hpp"

namespace curvflow {

using sphere::ScalarField;

PhiSpec PhiSpec::power(double p) {
  if (!std::isfinite(p)) throw DataError("phi.p must be finite");
  PhiSpec s;
  s.kind_ = Kind::power;
  s.p_ = p;
  return s;
}

PhiSpec PhiSpec::table(std::vector<std::pair<double, double>> samples) {
  PhiSpec s;
  s.kind_ = Kind::table;
  s.table_ = LogLogTable(std::move(samples));
  return s;
}

double PhiSpec::value(double s) const { return kind_ == Kind::power ? std::pow(s, 1.0 - p_) : table_.value(s); }

double PhiSpec::derivative(double s) const { return value(s) * mu(s) / s; }

double PhiSpec::mu(double s) const { return kind_ == Kind::power ? 1.0 - p_ : table_.log_slope(s); }

double PhiSpec::mu_derivative(double s) const {
  return kind_ == Kind::power ? 0.0 : table_.log_slope_derivative(s) / s;
}

bool PhiSpec::operator==(const PhiSpec& o) const {
  if (kind_ != o.kind_) return false;
  return kind_ == Kind::power ? p_ == o.p_ : samples() == o.samples();
}

GSpec GSpec::constant() { return GSpec{}; }

GSpec GSpec::radial_power(double q, int n) {
  if (!std::isfinite(q)) throw DataError("g.q must be finite");
  GSpec g;
  g.kind_ = Kind::radial_power;
  g.q_ = q;
  g.n_ = n;
  return g;
}

GSpec GSpec::radial_table(std::vector<std::pair<double, double>> samples) {
  GSpec g;
  g.kind_ = Kind::radial_table;
  g.table_ = LogLogTable(std::move(samples));
  return g;
}

double GSpec::value(double r) const {
  switch (kind_) {
    case Kind::constant:
      return 1.0;
    case Kind::radial_power:
      return std::pow(r, q_ - n_);
    default:
      return table_.value(r);
  }
}

double GSpec::nu(double r) const {
  switch (kind_) {
    case Kind::constant:
      return 0.0;
    case Kind::radial_power:
      return q_ - n_;
    default:
      return table_.log_slope(r);
  }
}

Vec3 GSpec::gradient(const Vec3& y) const {
  const double r = norm(y);
  // G'(r) = G nu / r, gradient = G'(r) y / r.
  return y * (value(r) * nu(r) / (r * r));
}

bool GSpec::operator==(const GSpec& o) const {
  if (kind_ != o.kind_) return false;
  switch (kind_) {
    case Kind::constant:
      return true;
    case Kind::radial_power:
      return q_ == o.q_ && n_ == o.n_;
    default:
      return samples() == o.samples();
  }
}

double FieldExpr::operator()(const Vec3& x) const {
  double pert = 0.0;
  for (const MonomialTerm& t : terms) {
    double m = t.coef;
    for (int a = 0; a < 3; ++a) m *= std::pow(x[a], t.powers[static_cast<std::size_t>(a)]);
    pert += m;
  }
  return base * (1.0 + pert);
}

ProblemSpec make_problem(const ProblemDefinition& def, sphere::GridPtr grid) {
  if (def.n != 2 && def.n != 3) throw DomainError("n must be 2 or 3");
  if (def.k < 1 || def.k > def.n - 1) throw DomainError("k must satisfy 1 <= k <= n-1");
  if (!(def.vartheta > 0.0)) throw DomainError("vartheta must be positive");
  if (grid->dim() != def.n) throw DomainError("grid dimension does not match n");
  if (def.g.kind() == GSpec::Kind::radial_power && def.g.ambient() != def.n) {
    throw DomainError("G exponent was resolved for a different n");
  }
  ScalarField f = ScalarField::from_function(grid, [&](const Vec3& x) { return def.f(x); });
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(f[i] > 0.0)) throw DataError("f must be positive; f = " + std::to_string(f[i]) + " at node " + std::to_string(i));
  }
  return ProblemSpec{def.n, def.k, def.phi, def.g, std::move(f), def.vartheta, 1.0};
}

double round_speed_factor(const ProblemSpec& spec, double s) {
  return symfun::binomial(spec.n - 1, spec.k) * std::pow(s, spec.k) * spec.phi.value(s) * spec.g.value(s);
}

namespace {

std::vector<double> log_samples(double lo, double hi, int count) {
  std::vector<double> s(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    s[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
  }
  s.back() = hi;
  return s;
}

}  // namespace

AssumptionAReport check_assumption_A(const ProblemSpec& spec, double s_lo, double s_hi, double eps_min) {
  if (!(0.0 < s_lo && s_lo < 1.0 && 1.0 < s_hi)) throw PreconditionError("need 0 < s_lo < 1 < s_hi");
  const double window = std::sqrt(10.0);
  auto log_phi_g = [&](double s) {
    const double v = spec.phi.value(s) * spec.g.value(s);
    if (!(v > 0.0) || !std::isfinite(v)) throw DataError("phi*G is not positive at s = " + std::to_string(s));
    return std::log(v);
  };
  const double lw = std::log(window);
  const double slope_lo = (log_phi_g(s_lo * window) - log_phi_g(s_lo)) / lw;
  const double slope_hi = (log_phi_g(s_hi) - log_phi_g(s_hi / window)) / lw;

  AssumptionAReport r;
  r.eps_low = -spec.k - slope_lo;
  r.eps_high = -spec.k - slope_hi;
  // beta's bracket phi*G * s^(k+eps) over the fitting windows.
  double b1 = std::numeric_limits<double>::infinity();
  double b0 = 0.0;
  for (double s : log_samples(s_lo, s_lo * window, 16)) b1 = std::min(b1, std::exp(log_phi_g(s)) * std::pow(s, spec.k + r.eps_low));
  for (double s : log_samples(s_hi / window, s_hi, 16)) b0 = std::max(b0, std::exp(log_phi_g(s)) * std::pow(s, spec.k + r.eps_high));
  r.beta0 = b0;
  r.beta1 = b1;
  r.pass_low = r.eps_low >= eps_min;
  r.pass_high = r.eps_high >= eps_min;
  r.pass = r.pass_low && r.pass_high;
  if (!r.pass_high) r.message += "phi*G decays no faster than s^-k near infinity (eps=" + std::to_string(r.eps_high) + "); ";
  if (!r.pass_low) r.message += "phi*G grows no faster than s^-k near zero (eps=" + std::to_string(r.eps_low) + "); ";
  return r;
}

std::vector<double> f_condition_eigenvalues(const ProblemSpec& spec) {
  const double a = spec.k + spec.vartheta;
  std::vector<double> g(spec.f.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::pow(spec.f[i], -1.0 / a);
  const ScalarField gf(spec.f.grid_ptr(), g);
  const sphere::FrameDerivatives d = sphere::grad_hess(gf);
  std::vector<double> eig(g.size());
  const int dim = spec.n - 1;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const symfun::SymMatrix m = symfun::SymMatrix::identity(dim) * ((spec.k + 1) * g[i]) + d.hess[i] * a;
    eig[i] = m.min_eigenvalue();
  }
  return eig;
}

Theorem1Report check_theorem1_conditions(const ProblemSpec& spec, double s_lo, double s_hi, int samples) {
  Theorem1Report r;
  const std::vector<double> s = log_samples(s_lo, s_hi, samples);
  constexpr double tol = 1e-12;

  r.mu_monotone = true;
  double mu_prev = spec.phi.mu(s.front());
  r.mu_min = r.mu_max = mu_prev;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double mu = spec.phi.mu(s[i]);
    r.mu_min = std::min(r.mu_min, mu);
    r.mu_max = std::max(r.mu_max, mu);
    r.worst_mu_decrease = std::max(r.worst_mu_decrease, mu_prev - mu);
    if (spec.phi.mu_derivative(s[i]) < -tol) r.mu_monotone = false;
    mu_prev = mu;
  }
  if (r.worst_mu_decrease > tol) r.mu_monotone = false;
  if (!r.mu_monotone) r.messages.push_back("mu(s) = s (log phi)'(s) is not nondecreasing");

  r.mu_in_range = r.mu_min >= -spec.vartheta - tol && r.mu_max <= -1.0 + tol;
  if (!r.mu_in_range) r.messages.push_back("mu out of [-vartheta,-1]");

  double nu_max = -std::numeric_limits<double>::infinity();
  for (double v : s) nu_max = std::max(nu_max, spec.g.nu(v));
  r.sign_max = spec.k + r.mu_max + nu_max;
  r.sign_condition = r.sign_max < 0.0;
  if (!r.sign_condition) r.messages.push_back("k + mu + grad G.y/G is not negative");

  const std::vector<double> eig = f_condition_eigenvalues(spec);
  const auto it = std::min_element(eig.begin(), eig.end());
  r.f_min_eigenvalue = *it;
  r.f_worst_node = static_cast<std::size_t>(it - eig.begin());
  r.f_condition = r.f_min_eigenvalue > 0.0;
  if (!r.f_condition) r.messages.push_back("f-condition matrix is not positive definite");

  r.pass = r.mu_monotone && r.mu_in_range && r.sign_condition && r.f_condition;
  return r;
}

UniquenessConditionReport check_uniqueness_condition(const ProblemSpec& spec, int m_samples, int s_samples,
                                                     double m_max, double s_lo, double s_hi) {
  if (!spec.g.radial()) throw PreconditionError("uniqueness condition needs a radial G");
  UniquenessConditionReport r;
  r.worst_violation = -std::numeric_limits<double>::infinity();
  const std::vector<double> ms = log_samples(1.0, m_max, m_samples);
  const std::vector<double> ss = log_samples(s_lo, s_hi, s_samples);
  for (double m : ms)
    for (double s1 : ss)
      for (double s2 : ss) {
        const double lhs = spec.phi.value(m * s1) * spec.g.value(m * s2);
        const double rhs = spec.phi.value(s1) * spec.g.value(s2) * std::pow(m, -spec.k);
        const double violation = (lhs - rhs) / rhs;
        if (violation > r.worst_violation) {
          r.worst_violation = violation;
          r.m = m;
          r.s1 = s1;
          r.s2 = s2;
        }
      }
  r.pass = r.worst_violation <= 1e-12;
  return r;
}

bool scale_invariant(const ProblemSpec& spec, double s_lo, double s_hi) {
  for (double s : log_samples(s_lo, s_hi, 200)) {
    if (std::abs(spec.k + spec.phi.mu(s) + spec.g.nu(s)) > 1e-9) return false;
  }
  return true;
}

std::optional<C0Bracket> c0_bracket(const ProblemSpec& spec) {
  if (scale_invariant(spec)) return std::nullopt;
  const double fmin = spec.f.min(), fmax = spec.f.max();
  auto crossing = [&](double target) -> std::optional<double> {
    double lo = std::log(1e-8), hi = std::log(1e8);
    auto excess = [&](double ls) { return round_speed_factor(spec, std::exp(ls)) - target; };
    if (!(excess(lo) > 0.0 && excess(hi) < 0.0)) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return std::exp(0.5 * (lo + hi));
  };
  const auto lower = crossing(fmax);
  const auto upper = crossing(fmin);
  if (!lower || !upper) return std::nullopt;
  return C0Bracket{*lower, *upper};
}

}  // namespace curvflow
