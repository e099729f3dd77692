#include "tubular/expr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <utility>

namespace tubular {

namespace {

constexpr std::array<std::pair<std::string_view, Func>, 9> kFunctions{{
    {"sin", Func::sin},
    {"cos", Func::cos},
    {"tan", Func::tan},
    {"sinh", Func::sinh},
    {"cosh", Func::cosh},
    {"tanh", Func::tanh},
    {"exp", Func::exp},
    {"log", Func::log},
    {"sqrt", Func::sqrt},
}};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("empty expression at offset 0", 0);
    Expr e = sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { fail_at(what, pos_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const {
    throw ParseError(what + " at offset " + std::to_string(at), at);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr sum() {
    Expr lhs = product();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(Expr::Kind::add, std::move(lhs), product());
      } else if (accept('-')) {
        lhs = Expr::binary(Expr::Kind::sub, std::move(lhs), product());
      } else {
        return lhs;
      }
    }
  }

  Expr product() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(Expr::Kind::mul, std::move(lhs), unary());
      } else if (accept('/')) {
        lhs = Expr::binary(Expr::Kind::div, std::move(lhs), unary());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) {
      skip_ws();
      // "-2.5" is a negative literal unless a power follows: -2^2 = -(2^2)
      if (pos_ < text_.size() &&
          (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
        Expr lit = number();
        if (accept('^'))
          return Expr::unary(Expr::Kind::negate,
                             Expr::binary(Expr::Kind::pow, std::move(lit), unary()));
        return Expr::number(-lit.value());
      }
      return Expr::unary(Expr::Kind::negate, unary());
    }
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) return Expr::binary(Expr::Kind::pow, std::move(base), unary());
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ == text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
        pos_ = p;
      }
    }
    const std::string literal(text_.substr(start, pos_ - start));
    if (literal == ".") fail_at("malformed number", start);
    char* end = nullptr;
    const double v = std::strtod(literal.c_str(), &end);
    if (end != literal.c_str() + literal.size() || !std::isfinite(v))
      fail_at("malformed number '" + literal + "'", start);
    return Expr::number(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    for (const auto& [fname, f] : kFunctions) {
      if (name != fname) continue;
      if (!accept('(')) fail("expected '(' after function '" + std::string(name) + "'");
      std::vector<Expr> args;
      skip_ws();
      if (!accept(')')) {
        args.push_back(sum());
        while (accept(',')) args.push_back(sum());
        if (!accept(')')) fail("expected ')'");
      }
      if (args.size() != 1) {
        fail_at("function '" + std::string(name) + "' takes 1 argument, got " +
                    std::to_string(args.size()),
                start);
      }
      return Expr::call(f, std::move(args.front()));
    }
    if (name.size() == 2 && name[0] == 't' && name[1] >= '1' && name[1] <= '9')
      return Expr::variable(name[1] - '1');
    if (name == "pi") return Expr::number(std::numbers::pi);
    if (name == "e") return Expr::number(std::numbers::e);
    fail_at("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double apply(Func f, double x) {
  switch (f) {
    case Func::sin: return std::sin(x);
    case Func::cos: return std::cos(x);
    case Func::tan: return std::tan(x);
    case Func::sinh: return std::sinh(x);
    case Func::cosh: return std::cosh(x);
    case Func::tanh: return std::tanh(x);
    case Func::exp: return std::exp(x);
    case Func::log: return std::log(x);
    case Func::sqrt: return std::sqrt(x);
  }
  return 0.0;
}

}  // namespace

std::string_view func_name(Func f) {
  for (const auto& [name, g] : kFunctions)
    if (g == f) return name;
  return "?";
}

Expr Expr::number(double v) {
  Expr e;
  e.kind_ = Kind::number;
  e.value_ = v;
  return e;
}

Expr Expr::variable(int index) {
  if (index < 0 || index > 8) throw PreconditionError("variable index must be in [0, 8]");
  Expr e;
  e.kind_ = Kind::variable;
  e.var_ = index;
  return e;
}

Expr Expr::unary(Kind kind, Expr operand) {
  Expr e;
  e.kind_ = kind;
  e.children_.push_back(std::move(operand));
  return e;
}

Expr Expr::binary(Kind kind, Expr lhs, Expr rhs) {
  Expr e;
  e.kind_ = kind;
  e.children_.push_back(std::move(lhs));
  e.children_.push_back(std::move(rhs));
  return e;
}

Expr Expr::call(Func f, Expr arg) {
  Expr e;
  e.kind_ = Kind::call;
  e.func_ = f;
  e.children_.push_back(std::move(arg));
  return e;
}

double Expr::eval(std::span<const double> vars) const {
  switch (kind_) {
    case Kind::number: return value_;
    case Kind::variable:
      if (static_cast<std::size_t>(var_) >= vars.size())
        throw PreconditionError("expression uses t" + std::to_string(var_ + 1) + " but only " +
                                std::to_string(vars.size()) + " variables were supplied");
      return vars[static_cast<std::size_t>(var_)];
    case Kind::negate: return -children_[0].eval(vars);
    case Kind::add: return children_[0].eval(vars) + children_[1].eval(vars);
    case Kind::sub: return children_[0].eval(vars) - children_[1].eval(vars);
    case Kind::mul: return children_[0].eval(vars) * children_[1].eval(vars);
    case Kind::div: return children_[0].eval(vars) / children_[1].eval(vars);
    case Kind::pow: return std::pow(children_[0].eval(vars), children_[1].eval(vars));
    case Kind::call: return apply(func_, children_[0].eval(vars));
  }
  return 0.0;
}

int Expr::arity() const {
  int n = kind_ == Kind::variable ? var_ + 1 : 0;
  for (const Expr& c : children_) n = std::max(n, c.arity());
  return n;
}

std::string Expr::to_string() const {
  auto bin = [this](const char* op) {
    return "(" + children_[0].to_string() + " " + op + " " + children_[1].to_string() + ")";
  };
  switch (kind_) {
    case Kind::number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", value_);
      std::string s(buf);
      return value_ < 0 ? "(" + s + ")" : s;
    }
    case Kind::variable: return "t" + std::to_string(var_ + 1);
    case Kind::negate:
      // keep negate(literal) apart from a negative literal
      if (children_[0].kind_ == Kind::number) return "(-(" + children_[0].to_string() + "))";
      return "(-" + children_[0].to_string() + ")";
    case Kind::add: return bin("+");
    case Kind::sub: return bin("-");
    case Kind::mul: return bin("*");
    case Kind::div: return bin("/");
    case Kind::pow: return bin("^");
    case Kind::call:
      return std::string(func_name(func_)) + "(" + children_[0].to_string() + ")";
  }
  return {};
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Expr::Kind::number:
      if (a.value_ != b.value_) return false;
      break;
    case Expr::Kind::variable:
      if (a.var_ != b.var_) return false;
      break;
    case Expr::Kind::call:
      if (a.func_ != b.func_) return false;
      break;
    default: break;
  }
  return a.children_ == b.children_;
}

Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

}  // namespace tubular
