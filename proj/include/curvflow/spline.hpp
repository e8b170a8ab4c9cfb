#pragma once

#include <utility>
#include <vector>

namespace curvflow {

/// Natural cubic spline through (x_i, y_i), extended linearly past both ends.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

 private:
  std::size_t segment(double x) const;

  std::vector<double> x_, y_, m_;  // m_: second derivatives at the knots
};

/// Positive function of s > 0 tabulated as a cubic spline in (log s, log value).
/// Power-law extrapolation outside the table.
class LogLogTable {
 public:
  LogLogTable() = default;
  explicit LogLogTable(std::vector<std::pair<double, double>> samples);

  double value(double s) const;
  /// s d/ds log value(s).
  double log_slope(double s) const;
  /// d log_slope / d log s.
  double log_slope_derivative(double s) const;

  const std::vector<std::pair<double, double>>& samples() const { return samples_; }

 private:
  std::vector<std::pair<double, double>> samples_;
  CubicSpline spline_;
};

}  // namespace curvflow
