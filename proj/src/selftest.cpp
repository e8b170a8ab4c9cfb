#include "curvflow/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "curvflow/keyvalue.hpp"
#include "curvflow/sphere.hpp"
#include "curvflow/symfun.hpp"

namespace curvflow::selftest {

using symfun::EigenList;
using symfun::SymMatrix;

namespace {

constexpr double kPi = 3.14159265358979323846;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double a, double b) { return a + (b - a) * (static_cast<double>(eng_() >> 11) * 0x1.0p-53); }

 private:
  std::mt19937_64 eng_;
};

std::string fmt(double v) { return kv::format_real(v); }

double sigma_or_zero(const EigenList& l, int k) { return k > l.size() || k < 0 ? 0.0 : symfun::sigma_k(l, k); }

EigenList random_list(Rng& r, int m, double lo, double hi) {
  std::array<double, 2> v{r.uniform(lo, hi), r.uniform(lo, hi)};
  return EigenList(std::span<const double>(v.data(), static_cast<std::size_t>(m)));
}

SymMatrix random_sym(Rng& r, int m) {
  return m == 1 ? SymMatrix(r.uniform(-2, 2)) : SymMatrix(r.uniform(-2, 2), r.uniform(-2, 2), r.uniform(-2, 2));
}

SymMatrix random_pd(Rng& r) {
  const double a = r.uniform(0, kPi), l1 = r.uniform(0.05, 3.0), l2 = r.uniform(0.05, 3.0);
  const double c = std::cos(a), s = std::sin(a);
  return SymMatrix(c * c * l1 + s * s * l2, c * s * (l1 - l2), s * s * l1 + c * c * l2);
}

CheckResult identities(Rng& r) {
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int m = 1 + trial % 2;
    const EigenList lam = random_list(r, m, -3.0, 3.0);
    double abs_sum = 0.0;
    for (int i = 0; i < m; ++i) abs_sum += std::abs(lam[i]);
    for (int k = 1; k <= m; ++k) {
      const double sk = symfun::sigma_k(lam, k);
      double s2 = 0.0, s3 = 0.0, s4 = 0.0;
      for (int i = 0; i < m; ++i) {
        const EigenList rest = lam.without(i);
        const double a = symfun::sigma_k(rest, k);
        const double b = symfun::sigma_k(rest, k - 1);
        const double scale_k = std::max(1.0, std::pow(abs_sum, k));
        worst = std::max(worst, std::abs(sk - (a + lam[i] * b)) / scale_k);
        s2 += lam[i] * b;
        s3 += a;
        s4 += lam[i] * lam[i] * b;
      }
      const double scale_k = std::max(1.0, std::pow(abs_sum, k));
      const double scale_k1 = std::max(1.0, std::pow(abs_sum, k + 1));
      worst = std::max(worst, std::abs(s2 - k * sk) / scale_k);
      worst = std::max(worst, std::abs(s3 - (m - k) * sk) / scale_k);
      const double rhs4 = symfun::sigma_k(lam, 1) * sk - (k + 1) * sigma_or_zero(lam, k + 1);
      worst = std::max(worst, std::abs(s4 - rhs4) / scale_k1);
    }
  }
  return {"symfun.identities", worst <= 1e-12, "worst relative error " + fmt(worst) + " over 10^4 lists"};
}

CheckResult minors_vs_eigenvalues(Rng& r) {
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int m = 1 + trial % 2;
    const SymMatrix a = random_sym(r, m);
    for (int k = 0; k <= m; ++k) {
      const double x = symfun::sigma_k_matrix(a, k), y = symfun::sigma_k(a.eigenvalues(), k);
      worst = std::max(worst, std::abs(x - y) / std::max(1.0, std::pow(std::abs(a.trace()) + 4.0, k)));
    }
  }
  return {"symfun.minors_vs_eigenvalues", worst <= 1e-12, "worst relative error " + fmt(worst)};
}

CheckResult gradient_fd(Rng& r) {
  double worst = 0.0;
  const double step = 1e-6;
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 1 + trial % 2;
    const SymMatrix a = random_sym(r, m), e = random_sym(r, m);
    for (int k = 1; k <= m; ++k) {
      const double fd =
          (symfun::sigma_k_matrix(a + e * step, k) - symfun::sigma_k_matrix(a - e * step, k)) / (2.0 * step);
      const double an = symfun::contract(symfun::sigma_k_grad(a, k), e);
      worst = std::max(worst, std::abs(fd - an) / std::max(1e-3, std::abs(an)));
    }
  }
  return {"symfun.gradient_fd", worst <= 1e-6, "worst relative error " + fmt(worst) + " over 10^3 matrices"};
}

CheckResult newton_maclaurin(Rng& r) {
  double worst = std::numeric_limits<double>::infinity();
  int samples = 0;
  while (samples < 10000) {
    const EigenList lam = random_list(r, 2, -1.0, 3.0);
    const int k = 1 + samples % 2;
    if (!symfun::cone_report(lam, k).in_gamma_k) continue;
    ++samples;
    for (int l = 1; l <= k; ++l) worst = std::min(worst, symfun::newton_maclaurin_gap(lam, k, l));
  }
  double equal = 0.0;
  for (double c : {0.3, 1.0, 2.5}) equal = std::max(equal, std::abs(symfun::newton_maclaurin_gap({c, c}, 2, 1)));
  const bool ok = worst >= -1e-12 && equal <= 1e-14;
  return {"symfun.newton_maclaurin", ok, "min gap " + fmt(worst) + ", gap at equal eigenvalues " + fmt(equal)};
}

CheckResult concavity(Rng& r) {
  double worst = std::numeric_limits<double>::infinity();
  int samples = 0;
  while (samples < 10000) {
    const int k = 1 + samples % 2;
    const EigenList a = random_list(r, 2, -1.0, 3.0), b = random_list(r, 2, -1.0, 3.0);
    if (!symfun::cone_report(a, k).in_gamma_k || !symfun::cone_report(b, k).in_gamma_k) continue;
    ++samples;
    const EigenList mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
    const double f = [&](const EigenList& x) { return std::pow(symfun::sigma_k(x, k), 1.0 / k); }(mid);
    const double avg = 0.5 * (std::pow(symfun::sigma_k(a, k), 1.0 / k) + std::pow(symfun::sigma_k(b, k), 1.0 / k));
    worst = std::min(worst, f - avg);
  }
  return {"symfun.concavity", worst >= -1e-12, "min midpoint excess " + fmt(worst)};
}

CheckResult inverse_concavity(Rng& r) {
  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 1000; ++trial) {
    const SymMatrix w = random_pd(r);
    const double lhs = symfun::contract(symfun::sigma_k_grad(w, 2), w.squared());
    const double s2 = symfun::sigma_k_matrix(w, 2);
    worst = std::min(worst, lhs - 2.0 * std::pow(s2, 1.5));
  }
  return {"symfun.inverse_concavity", worst >= -1e-10, "min excess " + fmt(worst) + " over 10^3 matrices"};
}

// Smooth test function on R^3 with closed-form derivatives; its restriction to the sphere has
// covariant Hessian D^2F(e_i, e_j) - (x . DF) delta_ij.
struct TestFunction {
  static double value(const Vec3& y) { return std::exp(0.3 * y.x - 0.2 * y.y + 0.25 * y.z) + 0.5 * y.x * y.y * y.z; }
  static Vec3 gradient(const Vec3& y) {
    const double e = std::exp(0.3 * y.x - 0.2 * y.y + 0.25 * y.z);
    return {0.3 * e + 0.5 * y.y * y.z, -0.2 * e + 0.5 * y.x * y.z, 0.25 * e + 0.5 * y.x * y.y};
  }
  static double hess(const Vec3& y, const Vec3& a, const Vec3& b) {
    const double e = std::exp(0.3 * y.x - 0.2 * y.y + 0.25 * y.z);
    const Vec3 c{0.3, -0.2, 0.25};
    const double H[3][3] = {{0.0, 0.5 * y.z, 0.5 * y.y}, {0.5 * y.z, 0.0, 0.5 * y.x}, {0.5 * y.y, 0.5 * y.x, 0.0}};
    double s = e * dot(c, a) * dot(c, b);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += H[i][j] * a[i] * b[j];
    return s;
  }
};

struct DerivErrors {
  double sup = 0.0;
  double l2 = 0.0;
};

DerivErrors hessian_errors(int nlat) {
  const auto grid = sphere::build_grid(3, {nlat, 2 * nlat});
  const auto h = sphere::ScalarField::from_function(grid, TestFunction::value);
  const auto d = sphere::grad_hess(h);
  std::vector<double> sq(grid->size());
  DerivErrors e;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const Vec3& x = grid->node(i);
    const double radial = dot(x, TestFunction::gradient(x));
    double err = 0.0;
    for (int a = 0; a < 2; ++a) {
      err = std::max(err, std::abs(d.grad[i][static_cast<std::size_t>(a)] - dot(grid->frame(i, a), TestFunction::gradient(x))));
      for (int b = 0; b < 2; ++b) {
        const double exact = TestFunction::hess(x, grid->frame(i, a), grid->frame(i, b)) - (a == b ? radial : 0.0);
        err = std::max(err, std::abs(d.hess[i](a, b) - exact));
      }
    }
    e.sup = std::max(e.sup, err);
    sq[i] = err * err;
  }
  e.l2 = std::sqrt(sphere::integrate(*grid, sq));
  return e;
}

}  // namespace

std::vector<CheckResult> symfun_suite(std::uint64_t seed) {
  Rng r(seed);
  std::vector<CheckResult> out;
  out.push_back(identities(r));
  out.push_back(minors_vs_eigenvalues(r));
  out.push_back(gradient_fd(r));
  out.push_back(newton_maclaurin(r));
  out.push_back(concavity(r));
  out.push_back(inverse_concavity(r));
  return out;
}

std::vector<CheckResult> sphere_suite(std::uint64_t seed) {
  Rng r(seed);
  std::vector<CheckResult> out;

  {
    double worst = 0.0;
    for (int n : {16, 64, 256}) {
      const auto g = sphere::build_grid(2, {1, n});
      worst = std::max(worst, std::abs(sphere::pairwise_sum(g->weights()) - 2.0 * kPi));
    }
    for (int nlat : {8, 16, 32, 64}) {
      const auto g = sphere::build_grid(3, {nlat, 2 * nlat});
      worst = std::max(worst, std::abs(sphere::pairwise_sum(g->weights()) - 4.0 * kPi));
    }
    out.push_back({"sphere.weight_sum", worst <= 1e-10, "worst deviation " + fmt(worst)});
  }

  {
    // Second moments: int x_a x_b = measure / n delta_ab.
    double worst = 0.0;
    for (int n : {2, 3}) {
      const auto g = n == 2 ? sphere::build_grid(2, {1, 64}) : sphere::build_grid(3, {32, 64});
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const auto f = sphere::ScalarField::from_function(g, [&](const Vec3& x) { return x[a] * x[b]; });
          const double want = a == b ? g->measure() / n : 0.0;
          worst = std::max(worst, std::abs(sphere::integrate(f) - want));
        }
    }
    out.push_back({"sphere.moments", worst <= 1e-10, "worst deviation " + fmt(worst)});
  }

  {
    // S^1: trigonometric data are differentiated exactly.
    const auto g = sphere::build_grid(2, {1, 64});
    const double a = r.uniform(0.05, 0.2), b = r.uniform(0.05, 0.2);
    const auto h = sphere::ScalarField::from_function(g, [&](const Vec3& x) {
      const double t = std::atan2(x.y, x.x);
      return 2.0 + a * std::cos(3.0 * t) + b * std::sin(5.0 * t);
    });
    const auto d = sphere::grad_hess(h);
    double worst = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double t = g->theta(i);
      worst = std::max(worst, std::abs(d.grad[i][0] - (-3.0 * a * std::sin(3.0 * t) + 5.0 * b * std::cos(5.0 * t))));
      worst = std::max(worst, std::abs(d.hess[i](0, 0) - (-9.0 * a * std::cos(3.0 * t) - 25.0 * b * std::sin(5.0 * t))));
    }
    out.push_back({"sphere.circle_spectral", worst <= 1e-11, "worst derivative error " + fmt(worst)});
  }

  {
    const DerivErrors e16 = hessian_errors(16), e32 = hessian_errors(32), e64 = hessian_errors(64);
    const double o1 = std::log2(e16.l2 / e32.l2), o2 = std::log2(e32.l2 / e64.l2);
    std::ostringstream s;
    s << "L2 errors " << fmt(e16.l2) << ", " << fmt(e32.l2) << ", " << fmt(e64.l2) << "; orders " << fmt(o1) << ", "
      << fmt(o2) << "; sup " << fmt(e64.sup);
    out.push_back({"sphere.convergence_order", std::min(o1, o2) >= 3.5, s.str()});
  }

  {
    // Ellipse / ellipsoid support functions: h -> rho -> h.
    double worst1 = 0.0, worst2 = 0.0;
    const double a = r.uniform(1.0, 1.4), b = r.uniform(0.7, 1.0), c = r.uniform(0.8, 1.2);
    auto ell = [&](const Vec3& x) { return std::sqrt(a * a * x.x * x.x + b * b * x.y * x.y + c * c * x.z * x.z); };
    {
      const auto g = sphere::build_grid(2, {1, 128});
      const auto h = sphere::ScalarField::from_function(g, ell);
      const auto back = sphere::radial_to_support(sphere::support_to_radial(h));
      for (std::size_t i = 0; i < g->size(); ++i) worst1 = std::max(worst1, std::abs(back[i] - h[i]));
    }
    // The S^2 conversion refines by a local quadratic fit: second order, so check the rate.
    double s2[2] = {0.0, 0.0};
    for (int level = 0; level < 2; ++level) {
      const int nlat = 16 << level;
      const auto g = sphere::build_grid(3, {nlat, 2 * nlat});
      const auto h = sphere::ScalarField::from_function(g, ell);
      const auto back = sphere::radial_to_support(sphere::support_to_radial(h));
      for (std::size_t i = 0; i < g->size(); ++i) s2[level] = std::max(s2[level], std::abs(back[i] - h[i]));
    }
    worst2 = s2[1];
    const double order = std::log2(s2[0] / s2[1]);
    out.push_back({"sphere.support_radial_round_trip", worst1 <= 1e-8 && order >= 1.8 && worst2 <= 2e-3,
                   "S^1 " + fmt(worst1) + ", S^2 " + fmt(s2[0]) + " -> " + fmt(s2[1]) + " (order " + fmt(order) + ")"});
  }
  return out;
}

}  // namespace curvflow::selftest
