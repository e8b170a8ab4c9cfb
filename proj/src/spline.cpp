#include "curvflow/spline.hpp"

#include <algorithm>
#include <cmath>

#include "curvflow/errors.hpp"

namespace curvflow {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw DataError("spline needs at least two matching samples");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) throw DataError("spline abscissae must be strictly increasing");
  }
  m_.assign(n, 0.0);
  if (n == 2) return;
  // Thomas algorithm for the interior second derivatives, natural end conditions.
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
    const double a = h0, b = 2.0 * (h0 + h1), cc = h1;
    const double rhs = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    const double denom = b - a * c[i - 1];
    c[i] = cc / denom;
    d[i] = (rhs - a * d[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 1;) m_[i] = d[i] - c[i] * m_[i + 1];
}

std::size_t CubicSpline::segment(double x) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(i, x_.size() - 2);
}

double CubicSpline::operator()(double x) const {
  if (x < x_.front()) return y_.front() + derivative(x_.front()) * (x - x_.front());
  if (x > x_.back()) return y_.back() + derivative(x_.back()) * (x - x_.back());
  const std::size_t i = segment(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double x) const {
  x = std::clamp(x, x_.front(), x_.back());
  const std::size_t i = segment(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * m_[i] + (3.0 * b * b - 1.0) / 6.0 * h * m_[i + 1];
}

double CubicSpline::second_derivative(double x) const {
  if (x <= x_.front() || x >= x_.back()) return 0.0;
  const std::size_t i = segment(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
  return a * m_[i] + b * m_[i + 1];
}

LogLogTable::LogLogTable(std::vector<std::pair<double, double>> samples) : samples_(std::move(samples)) {
  std::vector<double> lx, ly;
  for (const auto& [s, v] : samples_) {
    if (!(s > 0.0) || !(v > 0.0) || !std::isfinite(s) || !std::isfinite(v)) {
      throw DataError("table samples must be positive and finite");
    }
    lx.push_back(std::log(s));
    ly.push_back(std::log(v));
  }
  spline_ = CubicSpline(std::move(lx), std::move(ly));
}

double LogLogTable::value(double s) const { return std::exp(spline_(std::log(s))); }

double LogLogTable::log_slope(double s) const { return spline_.derivative(std::log(s)); }

double LogLogTable::log_slope_derivative(double s) const { return spline_.second_derivative(std::log(s)); }

}  // namespace curvflow
