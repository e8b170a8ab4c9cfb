#pragma once

// Elementary symmetric functions of curvature radii for hypersurfaces in R^2 and R^3,
// i.e. for eigenvalue lists and symmetric matrices of size n-1 in {1, 2}.

#include <array>
#include <initializer_list>
#include <span>
#include <vector>

namespace curvflow::symfun {

/// Ordered eigenvalue list (lambda_1, ..., lambda_m), m in {1, 2}.
class EigenList {
 public:
  EigenList(std::initializer_list<double> values);
  explicit EigenList(std::span<const double> values);

  int size() const noexcept { return size_; }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }

  /// The list with entry i replaced by zero, written (lambda|i).
  EigenList without(int i) const;

 private:
  std::array<double, 2> values_{};
  int size_ = 0;
};

/// Symmetric m x m matrix, m in {1, 2}. Only the upper triangle is stored.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(double a11) : dim_(1), a11_(a11) {}
  SymMatrix(double a11, double a12, double a22) : dim_(2), a11_(a11), a12_(a12), a22_(a22) {}

  static SymMatrix identity(int dim);
  static SymMatrix zero(int dim);

  int dim() const noexcept { return dim_; }
  double operator()(int i, int j) const;
  void set(int i, int j, double value);

  double trace() const;
  double det() const;
  /// Eigenvalues in ascending order, closed form.
  EigenList eigenvalues() const;
  double min_eigenvalue() const;
  double max_eigenvalue() const;
  SymMatrix inverse() const;
  /// A*A.
  SymMatrix squared() const;

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator*(double s) const;
  bool operator==(const SymMatrix&) const = default;

 private:
  int dim_ = 2;
  double a11_ = 0.0;
  double a12_ = 0.0;
  double a22_ = 0.0;
};

/// Frobenius pairing sum_ij A_ij B_ij.
double contract(const SymMatrix& a, const SymMatrix& b);

/// Second derivatives d^2 sigma_k / (da_pq da_mn) of a 2x2 (or 1x1) argument.
class SigmaHessian {
 public:
  explicit SigmaHessian(int dim) : dim_(dim) {}
  int dim() const noexcept { return dim_; }
  double operator()(int p, int q, int m, int n) const { return data_[index(p, q, m, n)]; }
  double& at(int p, int q, int m, int n) { return data_[index(p, q, m, n)]; }

 private:
  static std::size_t index(int p, int q, int m, int n) {
    return static_cast<std::size_t>(((p * 2 + q) * 2 + m) * 2 + n);
  }
  int dim_;
  std::array<double, 16> data_{};
};

struct ConeReport {
  /// sigma_i for i = 1..k.
  std::vector<double> sigma;
  /// sigma_i > 0 for i = 1..k.
  std::vector<bool> positive;
  bool in_gamma_k = false;
};

/// Binomial coefficient C(m, k) as a double.
double binomial(int m, int k);

/// sigma_k(lambda), sigma_0 = 1. Throws DomainError unless 0 <= k <= size.
double sigma_k(const EigenList& lam, int k);

/// sigma_k of the eigenvalues of A, evaluated as the sum of principal k x k minors.
double sigma_k_matrix(const SymMatrix& a, int k);

/// Matrix of first derivatives sigma_k^{ij}, normalised so that
/// d/dt sigma_k(A + tE) = contract(sigma_k_grad(A), E) for symmetric E.
SymMatrix sigma_k_grad(const SymMatrix& a, int k);

/// Second derivatives sigma_k^{pq,mn} under the same symmetric convention.
SigmaHessian sigma_k_hess(const SymMatrix& a, int k);

ConeReport cone_report(const EigenList& lam, int k);

/// (sigma_l / C(m,l))^{1/l} - (sigma_k / C(m,k))^{1/k}; non-negative on Gamma_k.
/// Throws PreconditionError if lam is not in Gamma_k or 1 <= l <= k <= m fails.
double newton_maclaurin_gap(const EigenList& lam, int k, int l);

}  // namespace curvflow::symfun
