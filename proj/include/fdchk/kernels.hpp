#pragma once

// Data-parallel building blocks. Every kernel has a serial reference path
// (Exec::serial) kept for testing and benchmarking against the OpenMP path.
// Parallel reductions split the range into a fixed number of chunks and
// combine the partial sums in chunk order, so results do not depend on the
// thread count.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <vector>

#include "fdchk/linalg.hpp"

namespace fdchk {

enum class Exec { serial, parallel };

int max_threads();

namespace kernels {

inline constexpr std::size_t kReductionChunks = 256;

/// Holds the first exception thrown inside a parallel region; exceptions
/// must not cross an OpenMP region boundary.
class ExceptionSlot {
 public:
  template <class F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

template <class T, class Term>
T sum(std::size_t n, Term&& term, Exec exec = Exec::parallel) {
  if (exec == Exec::serial || n < 2 * kReductionChunks) {
    T acc{};
    for (std::size_t i = 0; i < n; ++i) acc += term(i);
    return acc;
  }
  std::vector<T> partial(kReductionChunks, T{});
  const std::size_t chunk = (n + kReductionChunks - 1) / kReductionChunks;
  ExceptionSlot slot;
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(kReductionChunks); ++c) {
    slot.run([&] {
      const std::size_t lo = static_cast<std::size_t>(c) * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      T acc{};
      for (std::size_t i = lo; i < hi; ++i) acc += term(i);
      partial[static_cast<std::size_t>(c)] = acc;
    });
  }
  slot.rethrow();
  T acc{};
  for (const T& p : partial) acc += p;
  return acc;
}

template <class Body>
void for_each(std::size_t n, Body&& body, Exec exec = Exec::parallel) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) slot.run([&] { body(static_cast<std::size_t>(i)); });
  slot.rethrow();
}

/// Compressed sparse row matrix with complex entries.
struct CsrMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col;
  std::vector<cplx> val;

  std::size_t nnz() const { return val.size(); }
  cplx at(std::size_t i, std::size_t j) const;
  std::vector<cplx> diagonal() const;
};

struct Triplet {
  std::uint32_t row, col;
  cplx value;
};

/// Sums duplicate (row, col) entries and drops exact zeros.
CsrMatrix csr_from_triplets(std::size_t rows, std::vector<Triplet> triplets);

void spmv(const CsrMatrix& a, std::span<const cplx> x, std::span<cplx> y, Exec exec = Exec::parallel);

/// Σ conj(a_i) b_i
cplx dot(std::span<const cplx> a, std::span<const cplx> b, Exec exec = Exec::parallel);
double norm2(std::span<const cplx> a, Exec exec = Exec::parallel);

}  // namespace kernels
}  // namespace fdchk
