#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fdchk/dsl.hpp"
#include "fdchk/linalg.hpp"

namespace fdchk {

/// x ↦ A(x), an N×N complex matrix whose entries are (re, im) expressions in
/// x1..xN. Constant fields skip expression evaluation entirely.
class MatrixField {
 public:
  struct Entry {
    dsl::Expr re, im;
  };

  MatrixField() = default;

  static MatrixField constant(const ComplexMatrix& a);

  /// entries[i][j] = {re_text, im_text}. Throws ParseError on bad text and
  /// ConfigError on shape problems or variables beyond x_N.
  static MatrixField parse(std::size_t n, const std::vector<std::vector<std::pair<std::string, std::string>>>& entries);

  std::size_t dimension() const { return n_; }
  bool is_constant() const { return constant_; }

  /// Throws EvalError if an entry cannot be evaluated at x.
  ComplexMatrix at(std::span<const double> x) const;

  /// Entry texts as printed expressions, for reports.
  std::vector<std::vector<std::pair<std::string, std::string>>> texts() const;

 private:
  std::size_t n_ = 0;
  bool constant_ = true;
  std::vector<Entry> entries_;  // row-major
  ComplexMatrix value_;         // valid when constant_
};

}  // namespace fdchk
