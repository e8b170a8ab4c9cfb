#include "curvflow/sphere.hpp"

#include <algorithm>
#include <limits>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "curvflow/errors.hpp"

namespace curvflow {

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

namespace sphere {

using symfun::SymMatrix;
constexpr double kPi = std::numbers::pi;

namespace {

// Fejer's first rule on cos(theta) at theta_i = (i + 1/2) pi / n; exact for polynomials of degree < n.
std::vector<double> fejer_weights(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double theta = (i + 0.5) * kPi / n;
    double s = 0.0;
    for (int j = 1; j <= n / 2; ++j) s += std::cos(2.0 * j * theta) / (4.0 * j * j - 1.0);
    w[static_cast<std::size_t>(i)] = 2.0 / n * (1.0 - 2.0 * s);
  }
  return w;
}

void require_positive(const ScalarField& h) {
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0)) {
      throw DegeneracyError("support function is not positive at node " + std::to_string(i), i, h[i]);
    }
  }
}

void require_convex(const FrameDerivatives& d) {
  for (std::size_t i = 0; i < d.w.size(); ++i) {
    const double e = d.w[i].min_eigenvalue();
    if (!(e > 0.0)) {
      throw DegeneracyError("field is not strictly convex at node " + std::to_string(i) +
                                " (min eigenvalue of w = " + std::to_string(e) + ")",
                            i, e);
    }
  }
}

// Solves the dense n x n system a x = b in place (partial pivoting); returns false if singular.
template <std::size_t N>
bool solve_dense(std::array<std::array<double, N>, N> a, std::array<double, N>& b) {
  for (std::size_t c = 0; c < N; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < N; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-300) return false;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < N; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < N; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = N; c-- > 0;) {
    for (std::size_t k = c + 1; k < N; ++k) b[c] -= a[c][k] * b[k];
    b[c] /= a[c][c];
  }
  return true;
}

// Minimum (sign = +1) or maximum (sign = -1) of the quadratic model g0 + g.s + s'Hs/2.
// Returns g0 when the model has no interior extremum of the requested kind.
double quadratic_extremum(double g0, const std::array<double, 2>& g, const SymMatrix& hess, double sign,
                          double max_step) {
  const SymMatrix hs = hess * sign;
  if (hs.dim() == 1) {
    if (!(hs(0, 0) > 0.0)) return g0;
    const double s = -g[0] / hess(0, 0);
    if (std::abs(s) > max_step) return g0;
    return g0 + 0.5 * g[0] * s;
  }
  if (!(hs.min_eigenvalue() > 0.0)) return g0;
  const SymMatrix inv = hess.inverse();
  const double s0 = -(inv(0, 0) * g[0] + inv(0, 1) * g[1]);
  const double s1 = -(inv(1, 0) * g[0] + inv(1, 1) * g[1]);
  if (std::hypot(s0, s1) > max_step) return g0;
  return g0 + 0.5 * (g[0] * s0 + g[1] * s1);
}

void format_double(std::ostream& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

SphericalGrid::SphericalGrid(int n, Resolution res) : n_(n), res_(res) {
  if (n == 2) {
    res_.nlat = 1;
    if (res_.nlon < 4) throw DomainError("S^1 grid needs at least 4 nodes");
    const int N = res_.nlon;
    dtheta_ = dphi_ = 2.0 * kPi / N;
    for (int j = 0; j < N; ++j) {
      const double t = dtheta_ * j;
      nodes_.push_back({std::cos(t), std::sin(t), 0.0});
      frames_.push_back({Vec3{-std::sin(t), std::cos(t), 0.0}, Vec3{}});
      weights_.push_back(dtheta_);
    }
  } else if (n == 3) {
    if (res_.nlat < 4 || res_.nlon < 4 || res_.nlon % 2 != 0) {
      throw DomainError("S^2 grid needs nlat >= 4 and an even nlon >= 4");
    }
    dtheta_ = kPi / res_.nlat;
    dphi_ = 2.0 * kPi / res_.nlon;
    const std::vector<double> fw = fejer_weights(res_.nlat);
    for (int i = 0; i < res_.nlat; ++i) {
      const double t = (i + 0.5) * dtheta_;
      const double st = std::sin(t), ct = std::cos(t);
      cutoffs_.push_back(std::max(1, static_cast<int>(std::floor(0.5 * res_.nlon * st))));
      for (int j = 0; j < res_.nlon; ++j) {
        const double p = dphi_ * j;
        const double sp = std::sin(p), cp = std::cos(p);
        nodes_.push_back({st * cp, st * sp, ct});
        frames_.push_back({Vec3{ct * cp, ct * sp, -st}, Vec3{-sp, cp, 0.0}});
        weights_.push_back(fw[static_cast<std::size_t>(i)] * dphi_);
      }
    }
  } else {
    throw DomainError("ambient dimension must be 2 or 3, got " + std::to_string(n));
  }
  fft_ = std::make_unique<RealFft>(res_.nlon);
}

std::size_t SphericalGrid::neighbor(int row, int col, int drow, int dcol) const {
  int r = n_ == 2 ? 0 : row + drow;
  int c = col + dcol;
  if (r < 0) {
    r = -r - 1;
    c += res_.nlon / 2;
  } else if (r >= res_.nlat) {
    r = 2 * res_.nlat - 1 - r;
    c += res_.nlon / 2;
  }
  c = ((c % res_.nlon) + res_.nlon) % res_.nlon;
  return index(r, c);
}

double SphericalGrid::theta(std::size_t i) const {
  if (n_ == 2) return dtheta_ * static_cast<double>(i);
  return (row_of(i) + 0.5) * dtheta_;
}

double SphericalGrid::phi(std::size_t i) const {
  if (n_ == 2) return theta(i);
  return dphi_ * col_of(i);
}

double SphericalGrid::measure() const { return n_ == 2 ? 2.0 * kPi : 4.0 * kPi; }

int SphericalGrid::polar_cutoff(int row) const {
  if (n_ == 2) return res_.nlon / 2;
  return cutoffs_[static_cast<std::size_t>(row)];
}

double SphericalGrid::laplacian_stiffness() const {
  const double half = 0.5 * res_.nlon;
  if (n_ == 2) return half * half;
  double phi_part = 0.0;
  for (int i = 0; i < res_.nlat; ++i) {
    const double s = std::sin((i + 0.5) * dtheta_);
    const double m = std::min<double>(cutoffs_[static_cast<std::size_t>(i)], half);
    phi_part = std::max(phi_part, m * m / (s * s));
  }
  // Symbol of the fourth-order centred second difference peaks at 16/3 per dtheta^2.
  return 16.0 / (3.0 * dtheta_ * dtheta_) + phi_part;
}

double SphericalGrid::stability_spacing() const { return 2.0 / std::sqrt(laplacian_stiffness()); }

GridPtr build_grid(int n, Resolution res) { return std::make_shared<const SphericalGrid>(n, res); }

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw DataError("scalar field needs a grid");
  if (values_.size() != grid_->size()) {
    throw DataError("field has " + std::to_string(values_.size()) + " values for a grid of " +
                    std::to_string(grid_->size()) + " nodes");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw DataError("non-finite field value at node " + std::to_string(i));
  }
}

ScalarField ScalarField::constant(GridPtr grid, double value) {
  const std::size_t n = grid->size();
  return ScalarField(std::move(grid), std::vector<double>(n, value));
}

ScalarField ScalarField::from_function(GridPtr grid, const std::function<double(const Vec3&)>& fn) {
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid->node(i));
  return ScalarField(std::move(grid), std::move(v));
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

FrameDerivatives grad_hess(const ScalarField& h) {
  const SphericalGrid& g = h.grid();
  const auto v = h.values();
  const std::size_t n = g.size();
  FrameDerivatives d;
  d.grad.resize(n);
  d.hess.resize(n);
  d.w.resize(n);
  const RealFft& fft = g.row_fft();

  if (g.dim() == 2) {
    std::vector<double> d1(n), d2(n);
    fft.derivatives(v, d1, d2);
    for (std::size_t i = 0; i < n; ++i) {
      d.grad[i] = {d1[i], 0.0};
      d.hess[i] = SymMatrix(d2[i]);
      d.w[i] = SymMatrix(d2[i] + v[i]);
    }
    return d;
  }

  const int nlat = g.nlat(), nlon = g.nlon();
  const double dt = g.dtheta();
  std::vector<double> ht(n), htt(n), hp(n), hpp(n), htp(n);
  for (int i = 0; i < nlat; ++i) {
    for (int j = 0; j < nlon; ++j) {
      auto at = [&](int dr) { return v[g.neighbor(i, j, dr, 0)]; };
      const double fm2 = at(-2), fm1 = at(-1), f0 = at(0), fp1 = at(1), fp2 = at(2);
      const std::size_t k = g.index(i, j);
      ht[k] = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * dt);
      htt[k] = (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * dt * dt);
    }
  }
  const auto row_span = [&](std::vector<double>& a, int i) {
    return std::span<double>(a).subspan(g.index(i, 0), static_cast<std::size_t>(nlon));
  };
  for (int i = 0; i < nlat; ++i) {
    fft.derivatives(v.subspan(g.index(i, 0), static_cast<std::size_t>(nlon)), row_span(hp, i), row_span(hpp, i));
    fft.derivatives(row_span(ht, i), row_span(htp, i), {});
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double t = g.theta(k);
    const double s = std::sin(t), c = std::cos(t);
    d.grad[k] = {ht[k], hp[k] / s};
    d.hess[k] = SymMatrix(htt[k], htp[k] / s - c * hp[k] / (s * s), hpp[k] / (s * s) + c / s * ht[k]);
    d.w[k] = d.hess[k] + SymMatrix::identity(2) * v[k];
  }
  return d;
}

std::vector<Vec3> embed(const ScalarField& h, const FrameDerivatives& d) {
  require_positive(h);
  const SphericalGrid& g = h.grid();
  std::vector<Vec3> pts(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vec3 x = g.node(i) * h[i] + g.frame(i, 0) * d.grad[i][0];
    if (g.dim() == 3) x = x + g.frame(i, 1) * d.grad[i][1];
    pts[i] = x;
  }
  return pts;
}

CircleInterpolant::CircleInterpolant(const ScalarField& h) : n_(static_cast<int>(h.size())) {
  if (h.grid().dim() != 2) throw DomainError("CircleInterpolant needs an S^1 field");
  coeffs_.resize(static_cast<std::size_t>(h.grid().row_fft().spectrum_size()));
  h.grid().row_fft().forward(h.values(), coeffs_);
}

std::array<double, 3> CircleInterpolant::operator()(double theta) const {
  double f = coeffs_[0].real(), f1 = 0.0, f2 = 0.0;
  const int top = static_cast<int>(coeffs_.size()) - 1;
  for (int m = 1; m <= top; ++m) {
    const bool nyquist = n_ % 2 == 0 && m == top;
    const double weight = nyquist ? 1.0 : 2.0;
    const double cr = coeffs_[static_cast<std::size_t>(m)].real();
    const double ci = nyquist ? 0.0 : coeffs_[static_cast<std::size_t>(m)].imag();
    const double cs = std::cos(m * theta), sn = std::sin(m * theta);
    const double re = cr * cs - ci * sn;
    const double dre = -cr * sn - ci * cs;
    f += weight * re;
    f1 += weight * m * dre;
    f2 -= weight * m * m * re;
  }
  const double inv = 1.0 / n_;
  return {f * inv, f1 * inv, f2 * inv};
}

namespace {

ScalarField circle_support_to_radial(const ScalarField& h, const FrameDerivatives& d) {
  const SphericalGrid& g = h.grid();
  const int N = static_cast<int>(g.size());
  const CircleInterpolant interp(h);
  // Gauss-map image angles alpha_j = theta_j + atan2(h', h), strictly increasing for convex h.
  std::vector<double> alpha(static_cast<std::size_t>(N) + 1);
  for (int j = 0; j < N; ++j) {
    alpha[static_cast<std::size_t>(j)] = g.theta(static_cast<std::size_t>(j)) +
                                         std::atan2(d.grad[static_cast<std::size_t>(j)][0], h[static_cast<std::size_t>(j)]);
  }
  alpha[static_cast<std::size_t>(N)] = alpha[0] + 2.0 * kPi;
  std::vector<double> rho(static_cast<std::size_t>(N));
  std::size_t seg = 0;
  for (int j = 0; j < N; ++j) {
    double u = g.theta(static_cast<std::size_t>(j));
    while (u < alpha[0]) u += 2.0 * kPi;
    while (u >= alpha[0] + 2.0 * kPi) u -= 2.0 * kPi;
    seg = 0;
    while (seg + 1 < alpha.size() && alpha[seg + 1] <= u) ++seg;
    double lo = g.dtheta() * static_cast<double>(seg);
    double hi = lo + g.dtheta();
    double t = lo + (u - alpha[seg]) / (alpha[seg + 1] - alpha[seg]) * (hi - lo);
    for (int it = 0; it < 50; ++it) {
      const auto [f, f1, f2] = interp(t);
      const double r2 = f * f + f1 * f1;
      const double res = t + std::atan2(f1, f) - u;
      if (res > 0.0) hi = t; else lo = t;
      const double slope = f * (f + f2) / r2;
      double next = slope > 0.0 ? t - res / slope : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - t) < 1e-15) {
        t = next;
        break;
      }
      t = next;
    }
    const auto [f, f1, f2] = interp(t);
    (void)f2;
    rho[static_cast<std::size_t>(j)] = std::sqrt(f * f + f1 * f1);
  }
  return ScalarField(h.grid_ptr(), std::move(rho));
}

// rho(u) = min over x with x.u > 0 of h(x) / (x.u): node search followed by a Newton step on the
// quadratic model of g(x) = h(x)/(x.u) in the tangent plane of the best node.
ScalarField sphere_support_to_radial(const ScalarField& h, const FrameDerivatives& d) {
  const SphericalGrid& g = h.grid();
  std::vector<double> rho(g.size());
  const double max_step = 2.0 * std::max(g.dtheta(), g.dphi());
  for (std::size_t target = 0; target < g.size(); ++target) {
    const Vec3& u = g.node(target);
    auto ratio = [&](std::size_t i) {
      const double c = dot(g.node(i), u);
      return c > 1e-12 ? h[i] / c : std::numeric_limits<double>::infinity();
    };
    std::size_t best = target;
    double best_val = ratio(best);
    for (bool moved = true; moved;) {
      moved = false;
      const int r = g.row_of(best), c = g.col_of(best);
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          const std::size_t nb = g.neighbor(r, c, dr, dc);
          const double val = ratio(nb);
          if (val < best_val) {
            best_val = val;
            best = nb;
            moved = true;
          }
        }
    }
    const double c0 = dot(g.node(best), u);
    const std::array<double, 2> dc{dot(g.frame(best, 0), u), dot(g.frame(best, 1), u)};
    const std::array<double, 2> gg{(d.grad[best][0] - best_val * dc[0]) / c0,
                                   (d.grad[best][1] - best_val * dc[1]) / c0};
    SymMatrix hess(0.0, 0.0, 0.0);
    for (int a = 0; a < 2; ++a)
      for (int b = a; b < 2; ++b) {
        const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
        const double value = (d.hess[best](a, b) - gg[ua] * dc[ub] - dc[ua] * gg[ub] + (a == b ? best_val * c0 : 0.0)) / c0;
        hess.set(a, b, value);
      }
    rho[target] = std::min(best_val, quadratic_extremum(best_val, gg, hess, 1.0, max_step));
  }
  return ScalarField(h.grid_ptr(), std::move(rho));
}

}  // namespace

ScalarField support_to_radial(const ScalarField& h) {
  require_positive(h);
  const FrameDerivatives d = grad_hess(h);
  require_convex(d);
  return h.grid().dim() == 2 ? circle_support_to_radial(h, d) : sphere_support_to_radial(h, d);
}

ScalarField radial_to_support(const ScalarField& rho) {
  require_positive(rho);
  const SphericalGrid& g = rho.grid();
  std::vector<double> out(g.size());
  if (g.dim() == 2) {
    const int N = static_cast<int>(g.size());
    const CircleInterpolant interp(rho);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Vec3& x = g.node(i);
      auto value = [&](int j) {
        const auto jj = static_cast<std::size_t>(((j % N) + N) % N);
        return rho[jj] * dot(g.node(jj), x);
      };
      int best = 0;
      for (int j = 1; j < N; ++j)
        if (value(j) > value(best)) best = j;
      // Newton on the trigonometric interpolant of rho(a) cos(a - theta) near the best node.
      const double t0 = g.theta(static_cast<std::size_t>(best)), th = g.theta(i);
      double a = t0;
      for (int it = 0; it < 30; ++it) {
        const auto [r0, r1, r2] = interp(a);
        const double c = std::cos(a - th), s = std::sin(a - th);
        const double f1 = r1 * c - r0 * s, f2 = r2 * c - 2.0 * r1 * s - r0 * c;
        if (!(f2 < 0.0)) break;
        const double next = a - f1 / f2;
        if (std::abs(next - t0) > g.dtheta()) break;
        const bool done = std::abs(next - a) < 1e-15;
        a = next;
        if (done) break;
      }
      out[i] = std::max(value(best), interp(a)[0] * std::cos(a - th));
    }
    return ScalarField(rho.grid_ptr(), std::move(out));
  }

  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3& x = g.node(i);
    auto value = [&](std::size_t j) { return rho[j] * dot(g.node(j), x); };
    std::size_t best = i;
    double best_val = value(best);
    for (bool moved = true; moved;) {
      moved = false;
      const int r = g.row_of(best), c = g.col_of(best);
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          const std::size_t nb = g.neighbor(r, c, dr, dc);
          if (value(nb) > best_val) {
            best_val = value(nb);
            best = nb;
            moved = true;
          }
        }
    }
    // Least-squares quadratic in tangent coordinates over the 3x3 neighbourhood.
    std::array<std::array<double, 6>, 6> ata{};
    std::array<double, 6> atb{};
    const Vec3& u0 = g.node(best);
    const int r = g.row_of(best), c = g.col_of(best);
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) {
        const std::size_t nb = g.neighbor(r, c, dr, dc);
        const Vec3 off = g.node(nb) - u0;
        const double a = dot(off, g.frame(best, 0)), b = dot(off, g.frame(best, 1));
        const std::array<double, 6> basis{1.0, a, b, 0.5 * a * a, a * b, 0.5 * b * b};
        const double f = value(nb);
        for (std::size_t p = 0; p < 6; ++p) {
          atb[p] += basis[p] * f;
          for (std::size_t q = 0; q < 6; ++q) ata[p][q] += basis[p] * basis[q];
        }
      }
    double refined = best_val;
    if (solve_dense(ata, atb)) {
      const SymMatrix hess(atb[3], atb[4], atb[5]);
      refined = quadratic_extremum(atb[0], {atb[1], atb[2]}, hess, -1.0, 2.0 * std::max(g.dtheta(), g.dphi()));
    }
    out[i] = std::max(best_val, refined);
  }
  return ScalarField(rho.grid_ptr(), std::move(out));
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double integrate(const SphericalGrid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw DataError("integrand size does not match grid");
  std::vector<double> prod(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) prod[i] = values[i] * grid.weight(i);
  return pairwise_sum(prod);
}

double integrate(const ScalarField& field) { return integrate(field.grid(), field.values()); }

Extrema field_extrema(const ScalarField& h, const FrameDerivatives& d) {
  const SphericalGrid& g = h.grid();
  const auto v = h.values();
  const auto lo_it = std::min_element(v.begin(), v.end());
  const auto hi_it = std::max_element(v.begin(), v.end());
  const auto lo = static_cast<std::size_t>(lo_it - v.begin());
  const auto hi = static_cast<std::size_t>(hi_it - v.begin());
  Extrema e{*lo_it, *hi_it};
  if (g.dim() == 2) {
    const CircleInterpolant interp(h);
    auto polish = [&](std::size_t node, double sign) {
      double t = g.theta(node);
      const double t0 = t;
      for (int it = 0; it < 30; ++it) {
        const auto [f, f1, f2] = interp(t);
        (void)f;
        if (!(sign * f2 > 0.0)) return v[node];
        const double next = t - f1 / f2;
        if (std::abs(next - t0) > g.dtheta()) return v[node];
        if (std::abs(next - t) < 1e-15) {
          t = next;
          break;
        }
        t = next;
      }
      return interp(t)[0];
    };
    e.min = std::min(e.min, polish(lo, 1.0));
    e.max = std::max(e.max, polish(hi, -1.0));
    return e;
  }
  const double step = 2.0 * std::max(g.dtheta(), g.dphi());
  e.min = std::min(e.min, quadratic_extremum(v[lo], d.grad[lo], d.hess[lo], 1.0, step));
  e.max = std::max(e.max, quadratic_extremum(v[hi], d.grad[hi], d.hess[hi], -1.0, step));
  return e;
}

void apply_polar_filter(const SphericalGrid& grid, std::span<double> values) {
  if (grid.dim() != 3) return;
  const auto nlon = static_cast<std::size_t>(grid.nlon());
  for (int i = 0; i < grid.nlat(); ++i) {
    grid.row_fft().truncate(values.subspan(grid.index(i, 0), nlon), grid.polar_cutoff(i));
  }
}

void write_snapshot(std::ostream& out, const ScalarField& h) {
  const FrameDerivatives d = grad_hess(h);
  const std::vector<Vec3> pts = embed(h, d);
  const SphericalGrid& g = h.grid();
  const int n = g.dim();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int a = 0; a < n; ++a) {
      format_double(out, pts[i][a]);
      out << ' ';
    }
    for (int a = 0; a < n; ++a) {
      format_double(out, g.node(i)[a]);
      out << (a + 1 < n ? ' ' : '\n');
    }
  }
}

ScalarField read_snapshot(std::istream& in, GridPtr grid) {
  const int n = grid->dim();
  std::vector<double> h;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::array<double, 6> vals{};
    for (int a = 0; a < 2 * n; ++a) {
      if (!(row >> vals[static_cast<std::size_t>(a)])) {
        throw DataError("snapshot line " + std::to_string(line_no) + ": expected " + std::to_string(2 * n) + " numbers");
      }
    }
    const std::size_t i = h.size();
    if (i >= grid->size()) throw DataError("snapshot has more rows than the grid has nodes");
    const Vec3 p{vals[0], vals[1], n == 3 ? vals[2] : 0.0};
    const Vec3 nrm{vals[static_cast<std::size_t>(n)], vals[static_cast<std::size_t>(n) + 1], n == 3 ? vals[5] : 0.0};
    if (norm(nrm - grid->node(i)) > 1e-9) {
      throw DataError("snapshot line " + std::to_string(line_no) + ": normal does not match grid node");
    }
    h.push_back(dot(p, grid->node(i)));
  }
  if (h.size() != grid->size()) throw DataError("snapshot has fewer rows than the grid has nodes");
  return ScalarField(std::move(grid), std::move(h));
}

}  // namespace sphere
}  // namespace curvflow
