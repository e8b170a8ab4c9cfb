#pragma once

// Discretisations of S^1 and S^2, covariant derivatives in orthonormal frames,
// quadrature, and conversions between support and radial functions.

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "curvflow/fourier.hpp"
#include "curvflow/symfun.hpp"

namespace curvflow {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);
Vec3 cross(const Vec3& a, const Vec3& b);

namespace sphere {

/// Node counts. On S^1 only `nlon` is used (nlat == 1).
struct Resolution {
  int nlat = 1;
  int nlon = 0;
  bool operator==(const Resolution&) const = default;
};

/// S^1: nlon equally spaced angles. S^2: nlat x nlon latitude-longitude grid with
/// half-offset colatitudes (no pole nodes). Immutable once built.
class SphericalGrid {
 public:
  SphericalGrid(int n, Resolution res);

  /// Ambient dimension, 2 or 3.
  int dim() const noexcept { return n_; }
  /// Number of tangent directions, n - 1.
  int tangent_dim() const noexcept { return n_ - 1; }
  std::size_t size() const noexcept { return nodes_.size(); }
  int nlat() const noexcept { return res_.nlat; }
  int nlon() const noexcept { return res_.nlon; }
  Resolution resolution() const noexcept { return res_; }

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(res_.nlon) + static_cast<std::size_t>(col);
  }
  int row_of(std::size_t i) const { return static_cast<int>(i / static_cast<std::size_t>(res_.nlon)); }
  int col_of(std::size_t i) const { return static_cast<int>(i % static_cast<std::size_t>(res_.nlon)); }

  /// Node reached by moving (drow, dcol) from (row, col); rows past a pole continue
  /// down the antipodal meridian.
  std::size_t neighbor(int row, int col, int drow, int dcol) const;

  const Vec3& node(std::size_t i) const { return nodes_[i]; }
  /// Orthonormal tangent frame at node i: e_theta (S^1: e_1) and e_phi.
  const Vec3& frame(std::size_t i, int a) const { return frames_[i][static_cast<std::size_t>(a)]; }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  /// S^1: the angle of node i. S^2: colatitude.
  double theta(std::size_t i) const;
  /// S^2: longitude. S^1: same as theta.
  double phi(std::size_t i) const;
  double dtheta() const noexcept { return dtheta_; }
  double dphi() const noexcept { return dphi_; }

  /// 2*pi or 4*pi.
  double measure() const;

  /// Highest longitudinal wavenumber the flow keeps on a latitude row (polar filter).
  int polar_cutoff(int row) const;
  /// Largest eigenvalue of the discrete (filtered) Laplacian symbol; the flow's
  /// parabolic time-step bound is 2 / (max |Theta sigma_k^{ij}| * this).
  double laplacian_stiffness() const;
  /// Equivalent grid spacing, 2 / sqrt(laplacian_stiffness()).
  double stability_spacing() const;

  const RealFft& row_fft() const { return *fft_; }

 private:
  int n_;
  Resolution res_;
  double dtheta_ = 0.0;
  double dphi_ = 0.0;
  std::vector<Vec3> nodes_;
  std::vector<std::array<Vec3, 2>> frames_;
  std::vector<double> weights_;
  std::vector<int> cutoffs_;
  std::unique_ptr<RealFft> fft_;
};

using GridPtr = std::shared_ptr<const SphericalGrid>;

/// n = 2: res.nlon angles; n = 3: res.nlat x res.nlon. Throws DomainError for other n.
GridPtr build_grid(int n, Resolution res);

/// Values of a function on the grid nodes.
class ScalarField {
 public:
  ScalarField(GridPtr grid, std::vector<double> values);

  static ScalarField constant(GridPtr grid, double value);
  static ScalarField from_function(GridPtr grid, const std::function<double(const Vec3&)>& fn);

  const SphericalGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double min() const;
  double max() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

struct FrameDerivatives {
  /// Tangential gradient components in the node frame.
  std::vector<std::array<double, 2>> grad;
  /// Second covariant derivatives h_ij.
  std::vector<symfun::SymMatrix> hess;
  /// w_ij = h_ij + h delta_ij.
  std::vector<symfun::SymMatrix> w;
};

FrameDerivatives grad_hess(const ScalarField& h);

/// Boundary points F(x) = grad h + h x. Throws DegeneracyError if h <= 0 somewhere.
std::vector<Vec3> embed(const ScalarField& h, const FrameDerivatives& d);

/// Radial function sampled at the grid directions.
ScalarField support_to_radial(const ScalarField& h);

/// Support function from a radial function: h(x) = max_u rho(u) u.x with local quadratic refinement.
ScalarField radial_to_support(const ScalarField& rho);

/// Quadrature sum of values * weights in fixed pairwise order.
double integrate(const ScalarField& field);
double integrate(const SphericalGrid& grid, std::span<const double> values);

/// Sum in fixed pairwise order, independent of thread count.
double pairwise_sum(std::span<const double> values);

struct Extrema {
  double min = 0.0;
  double max = 0.0;
};

/// Extremes of the continuous field the samples represent: grid extremes refined by
/// interpolation (S^1) or a local quadratic model (S^2).
Extrema field_extrema(const ScalarField& h, const FrameDerivatives& d);

/// Removes longitudinal modes above polar_cutoff(row) on every row (S^2 only).
void apply_polar_filter(const SphericalGrid& grid, std::span<double> values);

/// Snapshot rows "x y [z] nx ny [nz]": embedded point followed by the unit normal.
void write_snapshot(std::ostream& out, const ScalarField& h);
/// Recovers h = X.x from a snapshot written on the same grid.
ScalarField read_snapshot(std::istream& in, GridPtr grid);

/// Trigonometric interpolant of samples on S^1, evaluated off-grid.
class CircleInterpolant {
 public:
  explicit CircleInterpolant(const ScalarField& h);
  /// {h, h', h''} at angle theta.
  std::array<double, 3> operator()(double theta) const;

 private:
  int n_;
  std::vector<std::complex<double>> coeffs_;
};

}  // namespace sphere
}  // namespace curvflow
