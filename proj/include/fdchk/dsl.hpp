#pragma once

// Small real-valued expression language for coefficient fields, weight
// functions and initial data. Parse once, evaluate many times.

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace fdchk::dsl {

enum class Var : std::uint8_t { x1 = 0, x2 = 1, x3 = 2, s = 3 };
inline constexpr std::size_t kVarCount = 4;

enum class Op : std::uint8_t {
  number,
  constant_pi,
  constant_e,
  variable,
  neg,
  add,
  sub,
  mul,
  div,
  pow,
  fn_sin,
  fn_cos,
  fn_exp,
  fn_log,
  fn_sqrt,
  fn_abs,
  fn_atan,
  fn_min,
  fn_max,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::number;
  double value = 0.0;  // number literal
  Var var = Var::x1;   // variable reference
  std::vector<NodePtr> args;
};

/// Variable values for one evaluation. Unset variables raise UnboundVariable.
class Bindings {
 public:
  Bindings() = default;
  Bindings& set(Var v, double value) {
    values_[static_cast<std::size_t>(v)] = value;
    bound_ |= 1u << static_cast<unsigned>(v);
    return *this;
  }
  bool is_bound(Var v) const { return (bound_ >> static_cast<unsigned>(v)) & 1u; }
  double get(Var v) const { return values_[static_cast<std::size_t>(v)]; }

  static Bindings point(const double* x, std::size_t dim);

 private:
  std::array<double, kVarCount> values_{};
  unsigned bound_ = 0;
};

/// Immutable parsed expression. Cheap to copy; safe to share across threads.
class Expr {
 public:
  Expr();  // literal 0
  explicit Expr(NodePtr root);

  static Expr constant(double v);

  const Node& root() const { return *root_; }
  NodePtr root_ptr() const { return root_; }

  double eval(const Bindings& b) const;
  bool uses(Var v) const { return (used_ >> static_cast<unsigned>(v)) & 1u; }
  bool is_constant() const { return used_ == 0; }

 private:
  NodePtr root_;
  unsigned used_ = 0;
};

/// Recursive-descent parse. Throws ParseError with a byte offset.
Expr parse(std::string_view text);

/// Prints with the minimal parentheses needed for parse(print(e)) to rebuild
/// the same tree. Numbers use the shortest round-tripping representation.
std::string print(const Expr& e);

bool structurally_equal(const Node& a, const Node& b);
inline bool structurally_equal(const Expr& a, const Expr& b) { return structurally_equal(a.root(), b.root()); }

double eval(const Expr& e, const Bindings& b);

std::string_view var_name(Var v);

}  // namespace fdchk::dsl
