#include "fdchk/kernels.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fdchk {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace kernels {

cplx CsrMatrix::at(std::size_t i, std::size_t j) const {
  for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
    if (col[k] == j) return val[k];
  return {};
}

std::vector<cplx> CsrMatrix::diagonal() const {
  std::vector<cplx> d(rows);
  for (std::size_t i = 0; i < rows; ++i) d[i] = at(i, i);
  return d;
}

CsrMatrix csr_from_triplets(std::size_t rows, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  CsrMatrix m;
  m.rows = rows;
  m.row_ptr.assign(rows + 1, 0);
  std::size_t k = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    while (k < triplets.size() && triplets[k].row == r) {
      const std::uint32_t c = triplets[k].col;
      cplx v{};
      while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) v += triplets[k++].value;
      if (v != cplx{}) {
        m.col.push_back(c);
        m.val.push_back(v);
      }
    }
    m.row_ptr[r + 1] = m.val.size();
  }
  return m;
}

void spmv(const CsrMatrix& a, std::span<const cplx> x, std::span<cplx> y, Exec exec) {
  auto row = [&](std::size_t i) {
    cplx acc{};
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) acc += a.val[k] * x[a.col[k]];
    y[i] = acc;
  };
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < a.rows; ++i) row(i);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(a.rows); ++i) row(static_cast<std::size_t>(i));
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b, Exec exec) {
  return sum<cplx>(a.size(), [&](std::size_t i) { return std::conj(a[i]) * b[i]; }, exec);
}

double norm2(std::span<const cplx> a, Exec exec) {
  return std::sqrt(sum<double>(a.size(), [&](std::size_t i) { return std::norm(a[i]); }, exec));
}

}  // namespace kernels
}  // namespace fdchk
