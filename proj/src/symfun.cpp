#include "curvflow/symfun.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "curvflow/errors.hpp"

namespace curvflow::symfun {

namespace {

void require_size(std::size_t n) {
  if (n < 1 || n > 2) {
    throw DomainError("eigenvalue list must have length 1 or 2, got " + std::to_string(n));
  }
}

void require_order(int k, int lo, int hi) {
  if (k < lo || k > hi) {
    throw DomainError("order k=" + std::to_string(k) + " outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
}

}  // namespace

EigenList::EigenList(std::initializer_list<double> values)
    : EigenList(std::span<const double>(values.begin(), values.size())) {}

EigenList::EigenList(std::span<const double> values) {
  require_size(values.size());
  size_ = static_cast<int>(values.size());
  std::copy(values.begin(), values.end(), values_.begin());
}

EigenList EigenList::without(int i) const {
  EigenList out = *this;
  out.values_.at(static_cast<std::size_t>(i)) = 0.0;
  return out;
}

SymMatrix SymMatrix::identity(int dim) {
  require_size(static_cast<std::size_t>(dim));
  return dim == 1 ? SymMatrix(1.0) : SymMatrix(1.0, 0.0, 1.0);
}

SymMatrix SymMatrix::zero(int dim) {
  require_size(static_cast<std::size_t>(dim));
  return dim == 1 ? SymMatrix(0.0) : SymMatrix(0.0, 0.0, 0.0);
}

double SymMatrix::operator()(int i, int j) const {
  if (i == 0 && j == 0) return a11_;
  if (i == 1 && j == 1) return a22_;
  return a12_;
}

void SymMatrix::set(int i, int j, double value) {
  if (i == 0 && j == 0) {
    a11_ = value;
  } else if (i == 1 && j == 1) {
    a22_ = value;
  } else {
    a12_ = value;
  }
}

double SymMatrix::trace() const { return dim_ == 1 ? a11_ : a11_ + a22_; }

double SymMatrix::det() const { return dim_ == 1 ? a11_ : a11_ * a22_ - a12_ * a12_; }

EigenList SymMatrix::eigenvalues() const {
  if (dim_ == 1) return EigenList{a11_};
  const double mean = 0.5 * (a11_ + a22_);
  const double radius = std::hypot(0.5 * (a11_ - a22_), a12_);
  // The smaller root via det/larger avoids cancellation for nearly singular matrices.
  const double big = mean >= 0.0 ? mean + radius : mean - radius;
  double other = big != 0.0 ? det() / big : 0.0;
  double lo = std::min(big, other);
  double hi = std::max(big, other);
  if (radius == 0.0) lo = hi = mean;
  return EigenList{lo, hi};
}

double SymMatrix::min_eigenvalue() const { return eigenvalues()[0]; }

double SymMatrix::max_eigenvalue() const {
  const EigenList e = eigenvalues();
  return e[e.size() - 1];
}

SymMatrix SymMatrix::inverse() const {
  if (dim_ == 1) return SymMatrix(1.0 / a11_);
  const double d = det();
  return SymMatrix(a22_ / d, -a12_ / d, a11_ / d);
}

SymMatrix SymMatrix::squared() const {
  if (dim_ == 1) return SymMatrix(a11_ * a11_);
  return SymMatrix(a11_ * a11_ + a12_ * a12_, a12_ * (a11_ + a22_), a12_ * a12_ + a22_ * a22_);
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  SymMatrix r = *this;
  r.a11_ += o.a11_;
  r.a12_ += o.a12_;
  r.a22_ += o.a22_;
  return r;
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const { return *this + o * -1.0; }

SymMatrix SymMatrix::operator*(double s) const {
  SymMatrix r = *this;
  r.a11_ *= s;
  r.a12_ *= s;
  r.a22_ *= s;
  return r;
}

double contract(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() == 1) return a(0, 0) * b(0, 0);
  return a(0, 0) * b(0, 0) + 2.0 * a(0, 1) * b(0, 1) + a(1, 1) * b(1, 1);
}

double binomial(int m, int k) {
  if (k < 0 || k > m) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (m - k + i) / i;
  return c;
}

double sigma_k(const EigenList& lam, int k) {
  require_order(k, 0, lam.size());
  // e_j accumulated one entry at a time: e_j <- e_j + lambda * e_{j-1}.
  std::array<double, 3> e{1.0, 0.0, 0.0};
  for (int i = 0; i < lam.size(); ++i) {
    for (int j = i + 1; j >= 1; --j) e[static_cast<std::size_t>(j)] += lam[i] * e[static_cast<std::size_t>(j - 1)];
  }
  return e[static_cast<std::size_t>(k)];
}

double sigma_k_matrix(const SymMatrix& a, int k) {
  require_order(k, 0, a.dim());
  switch (k) {
    case 0:
      return 1.0;
    case 1:
      return a.trace();
    default:
      return a.det();
  }
}

SymMatrix sigma_k_grad(const SymMatrix& a, int k) {
  require_order(k, 1, a.dim());
  if (k == 1) return SymMatrix::identity(a.dim());
  // Cofactor matrix of a 2x2 argument.
  return SymMatrix(a(1, 1), -a(0, 1), a(0, 0));
}

SigmaHessian sigma_k_hess(const SymMatrix& a, int k) {
  require_order(k, 1, a.dim());
  SigmaHessian out(a.dim());
  if (k == 1) return out;
  auto delta = [](int i, int j) { return i == j ? 1.0 : 0.0; };
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q)
      for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n)
          out.at(p, q, m, n) =
              delta(p, q) * delta(m, n) - 0.5 * (delta(p, m) * delta(q, n) + delta(p, n) * delta(q, m));
  return out;
}

ConeReport cone_report(const EigenList& lam, int k) {
  require_order(k, 1, lam.size());
  ConeReport report;
  report.in_gamma_k = true;
  for (int i = 1; i <= k; ++i) {
    const double s = sigma_k(lam, i);
    report.sigma.push_back(s);
    report.positive.push_back(s > 0.0);
    report.in_gamma_k = report.in_gamma_k && s > 0.0;
  }
  return report;
}

double newton_maclaurin_gap(const EigenList& lam, int k, int l) {
  const int m = lam.size();
  if (!(1 <= l && l <= k && k <= m)) {
    throw PreconditionError("newton_maclaurin_gap needs 1 <= l <= k <= n-1");
  }
  if (!cone_report(lam, k).in_gamma_k) {
    throw PreconditionError("eigenvalues are not in Gamma_k");
  }
  const double lower = std::pow(sigma_k(lam, l) / binomial(m, l), 1.0 / l);
  const double upper = std::pow(sigma_k(lam, k) / binomial(m, k), 1.0 / k);
  return lower - upper;
}

}  // namespace curvflow::symfun
