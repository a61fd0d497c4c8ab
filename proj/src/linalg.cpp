#include "fdchk/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fdchk/errors.hpp"

namespace fdchk {

RealMatrix::RealMatrix(std::size_t n, std::initializer_list<double> rows) : n_(n), a_(rows) {
  if (a_.size() != n * n) throw PreconditionError("RealMatrix: expected n*n entries");
}

RealMatrix RealMatrix::identity(std::size_t n) {
  RealMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

RealMatrix RealMatrix::transpose() const {
  RealMatrix t(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

RealMatrix RealMatrix::symmetric_part() const {
  RealMatrix s(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) s(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
  return s;
}

double RealMatrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

double RealMatrix::quadratic_form(std::span<const double> x) const { return bilinear(x, x); }

double RealMatrix::bilinear(std::span<const double> x, std::span<const double> y) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n_; ++j) row += (*this)(i, j) * x[j];
    acc += y[i] * row;
  }
  return acc;
}

RealMatrix& RealMatrix::operator+=(const RealMatrix& o) {
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

RealMatrix& RealMatrix::operator*=(double c) {
  for (double& v : a_) v *= c;
  return *this;
}

ComplexMatrix::ComplexMatrix(std::size_t n, std::initializer_list<cplx> rows) : n_(n), a_(rows) {
  if (a_.size() != n * n) throw PreconditionError("ComplexMatrix: expected n*n entries");
}

ComplexMatrix::ComplexMatrix(const RealMatrix& re, const RealMatrix& im) : n_(re.size()), a_(n_ * n_) {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) (*this)(i, j) = {re(i, j), im(i, j)};
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

RealMatrix ComplexMatrix::re() const {
  RealMatrix r(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) r(i, j) = (*this)(i, j).real();
  return r;
}

RealMatrix ComplexMatrix::im() const {
  RealMatrix r(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) r(i, j) = (*this)(i, j).imag();
  return r;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix r(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : a_) m = std::max(m, std::abs(v));
  return m;
}

bool ComplexMatrix::is_finite() const {
  return std::all_of(a_.begin(), a_.end(), [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

ComplexMatrix ComplexMatrix::scaled(double c) const {
  ComplexMatrix r = *this;
  for (auto& v : r.a_) v *= c;
  return r;
}

SymmetricEigen jacobi_eigen(const RealMatrix& m) {
  const std::size_t n = m.size();
  RealMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = m(i, j);
  RealMatrix v = RealMatrix::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_norm() <= 1e-15 * scale || scale == 0.0) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == kMaxSweeps) throw ConvergenceFailure("Jacobi eigensolver did not converge in 100 sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SymmetricEigen out;
  for (std::size_t k : order) {
    out.values.push_back(a(k, k));
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = v(i, k);
    out.vectors.push_back(std::move(col));
  }
  return out;
}

double min_eigenvalue(const RealMatrix& m) {
  if (m.size() == 0) return 0.0;
  return jacobi_eigen(m).values.front();
}

}  // namespace fdchk
