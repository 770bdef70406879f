#pragma once

// Univariate real expression language.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | 'x' | 't' | 'pi' | 'e'
//            | func '(' expr ')' | '(' expr ')'
//   func    := abs | exp | ln | sqrt | sin | cos
//
// `^` binds tighter than unary minus, so "-x^2" is -(x^2) and "2^-x" is
// 2^(-x). At most one of the variables x and t may appear in a source.
// There is no implicit multiplication: "2x" is rejected.

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>

#include "hhdom/error.hpp"

namespace hhdom {

enum class Op {
  constant,
  variable,
  neg,
  abs,
  exp,
  ln,
  sqrt,
  sin,
  cos,
  add,
  sub,
  mul,
  div,
  pow,
};

namespace detail {

struct Node {
  Op op = Op::constant;
  double value = 0.0;
  std::string_view symbol;  // "pi" / "e" for named constants, else empty
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

using NodePtr = std::shared_ptr<const Node>;

inline bool is_unary(Op op) { return op >= Op::neg && op <= Op::cos; }
inline bool is_binary(Op op) { return op >= Op::add; }

inline constexpr std::array<std::pair<std::string_view, Op>, 6> kFunctions{{
    {"abs", Op::abs},
    {"exp", Op::exp},
    {"ln", Op::ln},
    {"sqrt", Op::sqrt},
    {"sin", Op::sin},
    {"cos", Op::cos},
}};

inline std::string_view function_name(Op op) {
  for (const auto& [name, fop] : kFunctions) {
    if (fop == op) return name;
  }
  return {};
}

inline NodePtr make_constant(double value, std::string_view symbol = {}) {
  auto n = std::make_shared<Node>();
  n->op = Op::constant;
  n->value = value;
  n->symbol = symbol;
  return n;
}

inline NodePtr make_variable() {
  auto n = std::make_shared<Node>();
  n->op = Op::variable;
  return n;
}

inline NodePtr make_node(Op op, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace detail

/// Immutable parsed expression in a single free variable (or none).
/// Copies share the underlying tree.
class Expr {
 public:
  Expr() : root_(detail::make_constant(0.0)) {}

  static Expr constant(double value) {
    if (!std::isfinite(value)) {
      throw Error(ErrorKind::invalid_argument, "expression constants must be finite");
    }
    return Expr(detail::make_constant(value), std::nullopt);
  }

  static Expr variable(char name = 'x') {
    if (name != 'x' && name != 't') {
      throw Error(ErrorKind::invalid_argument, "variable must be x or t");
    }
    return Expr(detail::make_variable(), name);
  }

  /// 'x', 't', or nullopt for a constant expression.
  [[nodiscard]] std::optional<char> variable_name() const { return var_; }
  [[nodiscard]] const detail::Node& root() const { return *root_; }

  friend Expr operator+(const Expr& a, const Expr& b) { return combine(Op::add, a, b); }
  friend Expr operator-(const Expr& a, const Expr& b) { return combine(Op::sub, a, b); }
  friend Expr operator*(const Expr& a, const Expr& b) { return combine(Op::mul, a, b); }
  friend Expr operator/(const Expr& a, const Expr& b) { return combine(Op::div, a, b); }

  /// Structural equality of trees. Named constants compare by value.
  friend bool structurally_equal(const Expr& a, const Expr& b) {
    return a.var_ == b.var_ && nodes_equal(*a.root_, *b.root_);
  }

 private:
  Expr(detail::NodePtr root, std::optional<char> var)
      : root_(std::move(root)), var_(var) {}

  // Combined expressions adopt the variable of whichever operand has one.
  // Variable nodes are anonymous, so mixing an x-expression with a
  // t-expression renames consistently.
  static Expr combine(Op op, const Expr& a, const Expr& b) {
    return Expr(detail::make_node(op, a.root_, b.root_), a.var_ ? a.var_ : b.var_);
  }

  static bool nodes_equal(const detail::Node& a, const detail::Node& b) {
    if (a.op != b.op) return false;
    if (a.op == Op::constant) return a.value == b.value;
    if (a.op == Op::variable) return true;
    if (!nodes_equal(*a.lhs, *b.lhs)) return false;
    if (detail::is_binary(a.op)) return nodes_equal(*a.rhs, *b.rhs);
    return true;
  }

  friend class Parser;
  friend Expr parse(std::string_view source);

  detail::NodePtr root_;
  std::optional<char> var_;
};

class Parser {
 public:
  explicit Parser(std::string_view source) : src_(source) {}

  Expr run() {
    auto root = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("operator or end of input");
    return Expr(std::move(root), var_);
  }

 private:
  [[noreturn]] void fail(std::string expected) const {
    throw ParseError(pos_, std::move(expected), src_);
  }

  void skip_ws() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
            src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("\"") + c + "\"");
  }

  detail::NodePtr parse_expr() {
    auto lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = detail::make_node(Op::add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = detail::make_node(Op::sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  detail::NodePtr parse_term() {
    auto lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = detail::make_node(Op::mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = detail::make_node(Op::div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  detail::NodePtr parse_unary() {
    if (accept('-')) return detail::make_node(Op::neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  detail::NodePtr parse_power() {
    auto base = parse_primary();
    if (accept('^')) return detail::make_node(Op::pow, base, parse_unary());
    return base;
  }

  detail::NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("number, variable, function or \"(\"");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = parse_expr();
      expect(')');
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
      return parse_identifier();
    }
    fail("number, variable, function or \"(\"");
  }

  detail::NodePtr parse_number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      while (end < src_.size() && src_[end] >= '0' && src_[end] <= '9') ++end;
    };
    digits();
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      digits();
    }
    // Exponent only when followed by digits, so "2e" stays a (rejected)
    // number-then-identifier sequence rather than a malformed literal.
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t probe = end + 1;
      if (probe < src_.size() && (src_[probe] == '+' || src_[probe] == '-')) ++probe;
      if (probe < src_.size() && src_[probe] >= '0' && src_[probe] <= '9') {
        end = probe;
        digits();
      }
    }
    double value = 0.0;
    const auto text = src_.substr(start, end - start);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
      fail("finite numeric literal");
    }
    pos_ = end;
    return detail::make_constant(value);
  }

  detail::NodePtr parse_identifier() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < src_.size() &&
           ((src_[end] >= 'a' && src_[end] <= 'z') || (src_[end] >= 'A' && src_[end] <= 'Z') ||
            (src_[end] >= '0' && src_[end] <= '9') || src_[end] == '_')) {
      ++end;
    }
    const auto name = src_.substr(start, end - start);
    if (name == "x" || name == "t") {
      if (var_ && *var_ != name[0]) fail("the variable " + std::string(1, *var_));
      var_ = name[0];
      pos_ = end;
      return detail::make_variable();
    }
    if (name == "pi") {
      pos_ = end;
      return detail::make_constant(std::numbers::pi, "pi");
    }
    if (name == "e") {
      pos_ = end;
      return detail::make_constant(std::numbers::e, "e");
    }
    for (const auto& [fname, op] : detail::kFunctions) {
      if (name == fname) {
        pos_ = end;
        expect('(');
        auto arg = parse_expr();
        expect(')');
        return detail::make_node(op, std::move(arg));
      }
    }
    fail("x, t, pi, e or one of abs, exp, ln, sqrt, sin, cos");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::optional<char> var_;
};

inline Expr parse(std::string_view source) { return Parser(source).run(); }

namespace detail {

[[noreturn]] inline void domain_error(const char* what, double arg) {
  throw EvalError(ErrorKind::domain, std::string(what) + " (argument " + format_double(arg) + ")");
}

inline double checked(double result, const char* what) {
  if (!std::isfinite(result)) {
    throw EvalError(ErrorKind::overflow, std::string("non-finite result in ") + what);
  }
  return result;
}

inline double eval_node(const Node& n, double v) {
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::variable: return v;
    case Op::neg: return -eval_node(*n.lhs, v);
    case Op::abs: return std::fabs(eval_node(*n.lhs, v));
    case Op::exp: return checked(std::exp(eval_node(*n.lhs, v)), "exp");
    case Op::ln: {
      const double a = eval_node(*n.lhs, v);
      if (a <= 0.0) domain_error("ln of a non-positive number", a);
      return std::log(a);
    }
    case Op::sqrt: {
      const double a = eval_node(*n.lhs, v);
      if (a < 0.0) domain_error("sqrt of a negative number", a);
      return std::sqrt(a);
    }
    case Op::sin: return std::sin(eval_node(*n.lhs, v));
    case Op::cos: return std::cos(eval_node(*n.lhs, v));
    case Op::add: return checked(eval_node(*n.lhs, v) + eval_node(*n.rhs, v), "+");
    case Op::sub: return checked(eval_node(*n.lhs, v) - eval_node(*n.rhs, v), "-");
    case Op::mul: return checked(eval_node(*n.lhs, v) * eval_node(*n.rhs, v), "*");
    case Op::div: {
      const double a = eval_node(*n.lhs, v);
      const double b = eval_node(*n.rhs, v);
      if (b == 0.0) domain_error("division by zero", a);
      return checked(a / b, "/");
    }
    case Op::pow: {
      const double a = eval_node(*n.lhs, v);
      const double b = eval_node(*n.rhs, v);
      if (a == 0.0 && b < 0.0) domain_error("zero raised to a negative power", b);
      if (a < 0.0 && std::trunc(b) != b) {
        domain_error("negative base with non-integer exponent", a);
      }
      return checked(std::pow(a, b), "^");
    }
  }
  return 0.0;
}

inline void print_node(const Node& n, char var, std::string& out) {
  switch (n.op) {
    case Op::constant:
      out += n.symbol.empty() ? format_double(n.value) : std::string(n.symbol);
      return;
    case Op::variable:
      out += var;
      return;
    case Op::neg:
      out += "(-";
      print_node(*n.lhs, var, out);
      out += ')';
      return;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
    case Op::pow: {
      static constexpr std::string_view kSym = "+-*/^";
      out += '(';
      print_node(*n.lhs, var, out);
      out += ' ';
      out += kSym[static_cast<int>(n.op) - static_cast<int>(Op::add)];
      out += ' ';
      print_node(*n.rhs, var, out);
      out += ')';
      return;
    }
    default:
      out += function_name(n.op);
      out += '(';
      print_node(*n.lhs, var, out);
      out += ')';
      return;
  }
}

}  // namespace detail

/// Evaluates `e` at `value`. Throws EvalError(domain) for ln/sqrt outside
/// their domain, division by zero, 0^negative and negative^non-integer;
/// EvalError(overflow) when any intermediate result is not finite.
inline double evaluate(const Expr& e, double value) {
  if (!std::isfinite(value)) {
    throw EvalError(ErrorKind::domain, "evaluation point is not finite");
  }
  return detail::checked(detail::eval_node(e.root(), value), "expression");
}

/// Fully parenthesized source text; parse(to_string(e)) is structurally
/// identical to e for any parsed e.
inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print_node(e.root(), e.variable_name().value_or('x'), out);
  return out;
}

}  // namespace hhdom
