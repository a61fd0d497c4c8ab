#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fdchk {

using cplx = std::complex<double>;

/// Dense row-major real square matrix; sizes here are at most 2N = 6.
class RealMatrix {
 public:
  RealMatrix() = default;
  explicit RealMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}
  RealMatrix(std::size_t n, std::initializer_list<double> rows);

  static RealMatrix identity(std::size_t n);

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  RealMatrix transpose() const;
  RealMatrix symmetric_part() const;  // (M + Mᵀ)/2
  double max_abs() const;
  double quadratic_form(std::span<const double> x) const;          // xᵀ M x
  double bilinear(std::span<const double> x, std::span<const double> y) const;  // yᵀ M x = ⟨Mx, y⟩

  RealMatrix& operator+=(const RealMatrix& o);
  RealMatrix& operator*=(double c);
  friend RealMatrix operator+(RealMatrix a, const RealMatrix& b) { return a += b; }
  friend RealMatrix operator-(RealMatrix a, const RealMatrix& b) { return a += (-1.0 * b); }
  friend RealMatrix operator*(double c, RealMatrix a) { return a *= c; }

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

/// Dense row-major complex square matrix A = Re A + i Im A.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t n) : n_(n), a_(n * n) {}
  ComplexMatrix(std::size_t n, std::initializer_list<cplx> rows);
  ComplexMatrix(const RealMatrix& re, const RealMatrix& im);

  static ComplexMatrix identity(std::size_t n);

  std::size_t size() const { return n_; }
  cplx& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  RealMatrix re() const;
  RealMatrix im() const;
  ComplexMatrix adjoint() const;
  double max_abs() const;
  bool is_finite() const;
  ComplexMatrix scaled(double c) const;

 private:
  std::size_t n_ = 0;
  std::vector<cplx> a_;
};

struct SymmetricEigen {
  std::vector<double> values;          // ascending
  std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k], unit norm
};

/// Cyclic Jacobi eigensolver for a real symmetric matrix (only the upper
/// triangle is read). Throws ConvergenceFailure after 100 sweeps.
SymmetricEigen jacobi_eigen(const RealMatrix& m);

double min_eigenvalue(const RealMatrix& m);

}  // namespace fdchk
