#include "fdchk/matrix_field.hpp"

#include <charconv>

#include "fdchk/errors.hpp"

namespace fdchk {

namespace {

std::string number_text(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

MatrixField MatrixField::constant(const ComplexMatrix& a) {
  if (a.size() == 0) throw PreconditionError("MatrixField: empty matrix");
  if (!a.is_finite()) throw PreconditionError("MatrixField: non-finite entry");
  MatrixField f;
  f.n_ = a.size();
  f.constant_ = true;
  f.value_ = a;
  for (std::size_t i = 0; i < f.n_; ++i)
    for (std::size_t j = 0; j < f.n_; ++j)
      f.entries_.push_back({dsl::Expr::constant(a(i, j).real()), dsl::Expr::constant(a(i, j).imag())});
  return f;
}

MatrixField MatrixField::parse(std::size_t n,
                               const std::vector<std::vector<std::pair<std::string, std::string>>>& entries) {
  if (n < 1 || n > 3) throw ConfigError("matrix.dimension must be 1, 2 or 3");
  if (entries.size() != n) throw ConfigError("matrix.entries must have dimension rows");
  MatrixField f;
  f.n_ = n;
  f.constant_ = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (entries[i].size() != n) throw ConfigError("matrix.entries row " + std::to_string(i) + " has the wrong length");
    for (std::size_t j = 0; j < n; ++j) {
      Entry e{dsl::parse(entries[i][j].first.empty() ? "0" : entries[i][j].first),
              dsl::parse(entries[i][j].second.empty() ? "0" : entries[i][j].second)};
      for (const auto* ex : {&e.re, &e.im}) {
        if (ex->uses(dsl::Var::s)) throw ConfigError("matrix entries may not use s");
        for (std::size_t d = n; d < 3; ++d)
          if (ex->uses(static_cast<dsl::Var>(d)))
            throw ConfigError("matrix entry uses x" + std::to_string(d + 1) + " beyond the dimension");
        if (!ex->is_constant()) f.constant_ = false;
      }
      f.entries_.push_back(std::move(e));
    }
  }
  if (f.constant_) {
    ComplexMatrix a(n);
    const dsl::Bindings none;
    for (std::size_t k = 0; k < n * n; ++k) a(k / n, k % n) = {f.entries_[k].re.eval(none), f.entries_[k].im.eval(none)};
    f.value_ = a;
  }
  return f;
}

ComplexMatrix MatrixField::at(std::span<const double> x) const {
  if (constant_) return value_;
  const auto b = dsl::Bindings::point(x.data(), std::min<std::size_t>(x.size(), n_));
  ComplexMatrix a(n_);
  for (std::size_t k = 0; k < n_ * n_; ++k) a(k / n_, k % n_) = {entries_[k].re.eval(b), entries_[k].im.eval(b)};
  return a;
}

std::vector<std::vector<std::pair<std::string, std::string>>> MatrixField::texts() const {
  std::vector<std::vector<std::pair<std::string, std::string>>> out(n_);
  for (std::size_t k = 0; k < n_ * n_; ++k) {
    const auto& e = entries_[k];
    out[k / n_].emplace_back(e.re.is_constant() ? number_text(e.re.eval({})) : dsl::print(e.re),
                             e.im.is_constant() ? number_text(e.im.eval({})) : dsl::print(e.im));
  }
  return out;
}

}  // namespace fdchk
