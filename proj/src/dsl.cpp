#include "fdchk/dsl.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "fdchk/errors.hpp"

namespace fdchk::dsl {

namespace {

constexpr std::size_t kMaxInput = 64 * 1024;
constexpr int kMaxDepth = 512;

NodePtr make(Op op, std::vector<NodePtr> args = {}) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  return n;
}

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::number;
  n->value = v;
  return n;
}

NodePtr make_var(Var v) {
  auto n = std::make_shared<Node>();
  n->op = Op::variable;
  n->var = v;
  return n;
}

struct FunctionInfo {
  std::string_view name;
  Op op;
  int arity;
};

constexpr std::array<FunctionInfo, 9> kFunctions{{
    {"sin", Op::fn_sin, 1},
    {"cos", Op::fn_cos, 1},
    {"exp", Op::fn_exp, 1},
    {"log", Op::fn_log, 1},
    {"sqrt", Op::fn_sqrt, 1},
    {"abs", Op::fn_abs, 1},
    {"atan", Op::fn_atan, 1},
    {"min", Op::fn_min, 2},
    {"max", Op::fn_max, 2},
}};

const FunctionInfo* find_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return &f;
  return nullptr;
}

const FunctionInfo* find_function(Op op) {
  for (const auto& f : kFunctions)
    if (f.op == op) return &f;
  return nullptr;
}

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse_all() {
    auto e = expression();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError(pos_, "operator or end of input");
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int depth_ = 0;

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) throw ParseError(p.pos_, "shallower nesting");
    }
    ~DepthGuard() { --p.depth_; }
  };

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw ParseError(pos_, std::string("'") + c + "'");
  }

  // expr := term (('+' | '-') term)*
  NodePtr expression() {
    DepthGuard guard(*this);
    auto lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make(Op::add, {lhs, term()});
      else if (accept('-'))
        lhs = make(Op::sub, {lhs, term()});
      else
        return lhs;
    }
  }

  // term := unary (('*' | '/') unary)*
  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make(Op::mul, {lhs, unary()});
      else if (accept('/'))
        lhs = make(Op::div, {lhs, unary()});
      else
        return lhs;
    }
  }

  // unary := '-' unary | power
  NodePtr unary() {
    DepthGuard guard(*this);
    if (accept('-')) return make(Op::neg, {unary()});
    return power();
  }

  // power := primary ('^' unary)?     right-associative, binds tighter than unary minus
  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make(Op::pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(pos_, "expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expression();
      expect(')');
      return e;
    }
    if (is_digit(c) || c == '.') return number();
    if (is_ident_start(c)) return identifier();
    throw ParseError(pos_, "expression");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t k = pos_ + 1;
      if (k < text_.size() && (text_[k] == '+' || text_[k] == '-')) ++k;
      if (k < text_.size() && is_digit(text_[k])) {
        pos_ = k;
        while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) throw ParseError(start, "number");
    return make_number(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "pi") return make(Op::constant_pi);
    if (name == "e") return make(Op::constant_e);
    if (name == "x1") return make_var(Var::x1);
    if (name == "x2") return make_var(Var::x2);
    if (name == "x3") return make_var(Var::x3);
    if (name == "s") return make_var(Var::s);
    const FunctionInfo* fn = find_function(name);
    if (fn == nullptr) throw ParseError(start, "variable, constant or function name");
    expect('(');
    std::vector<NodePtr> args;
    args.push_back(expression());
    for (int i = 1; i < fn->arity; ++i) {
      expect(',');
      args.push_back(expression());
    }
    expect(')');
    return make(fn->op, std::move(args));
  }
};

unsigned collect_vars(const Node& n) {
  unsigned mask = n.op == Op::variable ? 1u << static_cast<unsigned>(n.var) : 0u;
  for (const auto& a : n.args) mask |= collect_vars(*a);
  return mask;
}

[[noreturn]] void domain_error(const char* what, double x) {
  throw EvalError(std::string(what) + " of " + std::to_string(x));
}

double eval_node(const Node& n, const Bindings& b) {
  switch (n.op) {
    case Op::number:
      return n.value;
    case Op::constant_pi:
      return std::numbers::pi;
    case Op::constant_e:
      return std::numbers::e;
    case Op::variable:
      if (!b.is_bound(n.var)) throw UnboundVariable(std::string(var_name(n.var)));
      return b.get(n.var);
    default:
      break;
  }
  const double a = eval_node(*n.args[0], b);
  double r = 0.0;
  switch (n.op) {
    case Op::neg: r = -a; break;
    case Op::add: r = a + eval_node(*n.args[1], b); break;
    case Op::sub: r = a - eval_node(*n.args[1], b); break;
    case Op::mul: r = a * eval_node(*n.args[1], b); break;
    case Op::div: {
      const double d = eval_node(*n.args[1], b);
      if (d == 0.0) throw EvalError("division by zero");
      r = a / d;
      break;
    }
    case Op::pow: {
      const double y = eval_node(*n.args[1], b);
      if (a < 0.0 && y != std::floor(y)) domain_error("non-integer power", a);
      if (a == 0.0 && y < 0.0) throw EvalError("division by zero in power");
      r = std::pow(a, y);
      break;
    }
    case Op::fn_sin: r = std::sin(a); break;
    case Op::fn_cos: r = std::cos(a); break;
    case Op::fn_exp: r = std::exp(a); break;
    case Op::fn_log:
      if (!(a > 0.0)) domain_error("log", a);
      r = std::log(a);
      break;
    case Op::fn_sqrt:
      if (a < 0.0) domain_error("sqrt", a);
      r = std::sqrt(a);
      break;
    case Op::fn_abs: r = std::abs(a); break;
    case Op::fn_atan: r = std::atan(a); break;
    case Op::fn_min: r = std::min(a, eval_node(*n.args[1], b)); break;
    case Op::fn_max: r = std::max(a, eval_node(*n.args[1], b)); break;
    default: throw EvalError("corrupt expression node");
  }
  if (!std::isfinite(r)) throw EvalError("non-finite intermediate result");
  return r;
}

// Binding strength used by the printer.
int precedence(const Node& n) {
  switch (n.op) {
    case Op::add:
    case Op::sub: return 1;
    case Op::mul:
    case Op::div: return 2;
    case Op::neg: return 3;
    case Op::pow: return 4;
    default: return 5;
  }
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print_node(child, out);
  if (parens) out += ')';
}

void print_node(const Node& n, std::string& out) {
  switch (n.op) {
    case Op::number: {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, n.value);
      (void)ec;
      out.append(buf, ptr);
      return;
    }
    case Op::constant_pi: out += "pi"; return;
    case Op::constant_e: out += "e"; return;
    case Op::variable: out += var_name(n.var); return;
    case Op::neg:
      out += '-';
      print_child(*n.args[0], precedence(*n.args[0]) < 3, out);
      return;
    case Op::pow:
      print_child(*n.args[0], precedence(*n.args[0]) <= 4, out);
      out += '^';
      print_child(*n.args[1], precedence(*n.args[1]) < 3, out);
      return;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div: {
      const int p = precedence(n);
      const char sym = n.op == Op::add ? '+' : n.op == Op::sub ? '-' : n.op == Op::mul ? '*' : '/';
      print_child(*n.args[0], precedence(*n.args[0]) < p, out);
      out += ' ';
      out += sym;
      out += ' ';
      print_child(*n.args[1], precedence(*n.args[1]) <= p, out);
      return;
    }
    default: {
      const FunctionInfo* fn = find_function(n.op);
      out += fn->name;
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print_node(*n.args[i], out);
      }
      out += ')';
    }
  }
}

}  // namespace

Bindings Bindings::point(const double* x, std::size_t dim) {
  Bindings b;
  for (std::size_t i = 0; i < dim && i < 3; ++i) b.set(static_cast<Var>(i), x[i]);
  return b;
}

Expr::Expr() : Expr(make_number(0.0)) {}

Expr::Expr(NodePtr root) : root_(std::move(root)), used_(collect_vars(*root_)) {}

Expr Expr::constant(double v) { return Expr(make_number(v)); }

double Expr::eval(const Bindings& b) const { return eval_node(*root_, b); }

Expr parse(std::string_view text) {
  if (text.size() > kMaxInput) throw ParseError(kMaxInput, "input of at most 64 KiB");
  return Expr(Parser(text).parse_all());
}

std::string print(const Expr& e) {
  std::string out;
  print_node(e.root(), out);
  return out;
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.op != b.op || a.args.size() != b.args.size()) return false;
  if (a.op == Op::number && a.value != b.value) return false;
  if (a.op == Op::variable && a.var != b.var) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!structurally_equal(*a.args[i], *b.args[i])) return false;
  return true;
}

double eval(const Expr& e, const Bindings& b) { return e.eval(b); }

std::string_view var_name(Var v) {
  switch (v) {
    case Var::x1: return "x1";
    case Var::x2: return "x2";
    case Var::x3: return "x3";
    case Var::s: return "s";
  }
  return "?";
}

}  // namespace fdchk::dsl
