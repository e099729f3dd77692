#pragma once

#include "tubular/types.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tubular {

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

enum class Func { sin, cos, tan, sinh, cosh, tanh, exp, log, sqrt };

// Expression tree over the variables t1..t9.
//
// Grammar (lowest to highest precedence):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' number ('^' unary)? | ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | t1..t9 | pi | e | func '(' sum ')' | '(' sum ')'
class Expr {
 public:
  enum class Kind { number, variable, negate, add, sub, mul, div, pow, call };

  static Expr number(double v);
  static Expr variable(int index);  // 0-based: t1 -> 0
  static Expr unary(Kind kind, Expr operand);
  static Expr binary(Kind kind, Expr lhs, Expr rhs);
  static Expr call(Func f, Expr arg);

  Kind kind() const { return kind_; }
  double value() const { return value_; }
  int var_index() const { return var_; }
  Func func() const { return func_; }
  const std::vector<Expr>& children() const { return children_; }

  double eval(std::span<const double> vars) const;
  // Largest variable index used plus one (0 for constant expressions).
  int arity() const;
  // Fully parenthesized text; parse(to_string()) reproduces the tree.
  std::string to_string() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  Kind kind_ = Kind::number;
  double value_ = 0.0;
  int var_ = 0;
  Func func_ = Func::sin;
  std::vector<Expr> children_;
};

Expr parse_expr(std::string_view text);

std::string_view func_name(Func f);

}  // namespace tubular
