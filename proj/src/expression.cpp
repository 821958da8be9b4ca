#include "distham/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <numbers>

namespace distham {

namespace {

bool has_variable(const Expr& e) {
  if (e.kind == Expr::Kind::variable) return true;
  for (const auto& a : e.args)
    if (has_variable(*a)) return true;
  return false;
}

}  // namespace

ExprPtr Expr::constant(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::constant;
  e->value = v;
  return e;
}

ExprPtr Expr::variable(int slot, std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::variable;
  e->slot = slot;
  e->name = std::move(name);
  return e;
}

ExprPtr Expr::unary(Kind k, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->args = {std::move(a)};
  return e;
}

ExprPtr Expr::binary(Kind k, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->args = {std::move(a), std::move(b)};
  if (k == Kind::pow) {
    if (has_variable(*e->args[1])) throw ConfigError("exponent must be a constant integer");
    const double v = evaluate<double>(*e->args[1], Vector());
    e->exponent = static_cast<int>(v);
  }
  return e;
}

ExprPtr Expr::call(Fn f, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::call;
  e->fn = f;
  e->args = {std::move(a)};
  return e;
}

int Scope::slot_of(const std::string& name) const {
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i] == name) return static_cast<int>(i);
  return -1;
}

const char* function_name(Expr::Fn f) {
  switch (f) {
    case Expr::Fn::sin: return "sin";
    case Expr::Fn::cos: return "cos";
    case Expr::Fn::exp: return "exp";
    case Expr::Fn::sqrt: return "sqrt";
  }
  return "?";
}

namespace {

class Parser {
 public:
  Parser(const std::string& text, const Scope& scope) : s_(text), scope_(scope) {}

  ExprPtr parse() {
    ExprPtr e = expr();
    skip();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  const std::string& s_;
  const Scope& scope_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what, std::optional<std::size_t> at = {}) const {
    const std::size_t off = at.value_or(pos_);
    throw ConfigError(what + " at offset " + std::to_string(off), off);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = Expr::binary(Expr::Kind::add, lhs, term());
      else if (accept('-'))
        lhs = Expr::binary(Expr::Kind::sub, lhs, term());
      else
        return lhs;
    }
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = Expr::binary(Expr::Kind::mul, lhs, unary());
      else if (accept('/'))
        lhs = Expr::binary(Expr::Kind::div, lhs, unary());
      else
        return lhs;
    }
  }

  ExprPtr unary() {
    if (accept('-')) return Expr::unary(Expr::Kind::neg, unary());
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    if (!accept('^')) return base;
    skip();
    const std::size_t at = pos_;
    ExprPtr ex = exponent();
    if (has_variable(*ex)) fail("exponent must be a constant integer", at);
    const double v = evaluate<double>(*ex, Vector());
    if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 1024)
      fail("non-integer exponent", at);
    return Expr::binary(Expr::Kind::pow, base, ex);
  }

  ExprPtr exponent() {
    if (accept('-')) return Expr::unary(Expr::Kind::neg, exponent());
    return power();
  }

  ExprPtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("expected an expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  ExprPtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mant = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      mant += digits();
    }
    if (mant == 0) fail("malformed number", start);
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("malformed exponent in number", start);
    }
    double v = 0.0;
    const auto r = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (r.ec != std::errc() || r.ptr != s_.data() + pos_) fail("malformed number", start);
    return Expr::constant(v);
  }

  ExprPtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      Expr::Fn f;
      if (name == "sin")
        f = Expr::Fn::sin;
      else if (name == "cos")
        f = Expr::Fn::cos;
      else if (name == "exp")
        f = Expr::Fn::exp;
      else if (name == "sqrt")
        f = Expr::Fn::sqrt;
      else
        fail("unknown function '" + name + "'", start);
      ++pos_;
      ExprPtr a = expr();
      if (!accept(')')) fail("expected ')' after argument of " + name);
      return Expr::call(f, a);
    }
    if (name == "sin" || name == "cos" || name == "exp" || name == "sqrt")
      fail("function '" + name + "' needs an argument", start);
    const int slot = scope_.slot_of(name);
    if (slot >= 0) return Expr::variable(slot, name);
    if (auto it = scope_.parameters.find(name); it != scope_.parameters.end())
      return Expr::constant(it->second);
    if (name == "pi") return Expr::constant(std::numbers::pi);
    fail("unknown identifier '" + name + "'", start);
  }
};

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::add:
    case Expr::Kind::sub: return 1;
    case Expr::Kind::mul:
    case Expr::Kind::div: return 2;
    case Expr::Kind::neg: return 3;
    case Expr::Kind::pow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string print(const Expr& e);

std::string wrap(const Expr& e, bool paren) { return paren ? "(" + print(e) + ")" : print(e); }

std::string print_exponent(const Expr& e) {
  if (e.kind == Expr::Kind::neg) return "-" + print_exponent(*e.args[0]);
  return wrap(e, precedence(e) < 4);
}

std::string print(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::constant: return format_number(e.value);
    case Expr::Kind::variable: return e.name;
    case Expr::Kind::neg: return "-" + wrap(*e.args[0], precedence(*e.args[0]) < 3);
    case Expr::Kind::pow: return wrap(*e.args[0], precedence(*e.args[0]) <= 4) + "^" + print_exponent(*e.args[1]);
    case Expr::Kind::call: return std::string(function_name(e.fn)) + "(" + print(*e.args[0]) + ")";
    default: {
      const int p = precedence(e);
      const char* op = e.kind == Expr::Kind::add   ? " + "
                       : e.kind == Expr::Kind::sub ? " - "
                       : e.kind == Expr::Kind::mul ? "*"
                                                   : "/";
      return wrap(*e.args[0], precedence(*e.args[0]) < p) + op +
             wrap(*e.args[1], precedence(*e.args[1]) <= p);
    }
  }
}

}  // namespace

ExprPtr parse_expression(const std::string& text, const Scope& scope) {
  return Parser(text, scope).parse();
}

std::string print_expression(const Expr& e) { return print(e); }

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case Expr::Kind::constant:
      if (a.value != b.value) return false;
      break;
    case Expr::Kind::variable:
      if (a.slot != b.slot || a.name != b.name) return false;
      break;
    case Expr::Kind::call:
      if (a.fn != b.fn) return false;
      break;
    case Expr::Kind::pow:
      if (a.exponent != b.exponent) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!structurally_equal(*a.args[i], *b.args[i])) return false;
  return true;
}

SmoothMap compile(std::vector<ExprPtr> exprs, int nvars, std::string name) {
  const int out = static_cast<int>(exprs.size());
  return SmoothMap::from(
      nvars, out,
      [exprs](const auto& x) {
        using T = typename std::decay_t<decltype(x)>::Scalar;
        Vec<T> y(static_cast<Eigen::Index>(exprs.size()));
        for (std::size_t i = 0; i < exprs.size(); ++i)
          y[static_cast<Eigen::Index>(i)] = evaluate<T>(*exprs[i], x);
        return y;
      },
      std::move(name));
}

}  // namespace distham
