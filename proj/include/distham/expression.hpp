#pragma once

// Small expression language for configs: + − * / ^(integer), unary −,
// sin cos exp sqrt, numeric literals, coordinate variables and named
// parameters. Evaluates over any scalar the AD layer provides.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "distham/errors.hpp"
#include "distham/smooth_map.hpp"

namespace distham {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { constant, variable, neg, add, sub, mul, div, pow, call };
  enum class Fn { sin, cos, exp, sqrt };

  Kind kind = Kind::constant;
  double value = 0.0;  // constant
  int slot = -1;       // variable
  std::string name;    // variable name
  Fn fn = Fn::sin;     // call
  int exponent = 0;    // pow: value of the constant right operand
  std::vector<ExprPtr> args;

  static ExprPtr constant(double v);
  static ExprPtr variable(int slot, std::string name);
  static ExprPtr unary(Kind k, ExprPtr a);
  static ExprPtr binary(Kind k, ExprPtr a, ExprPtr b);
  static ExprPtr call(Fn f, ExprPtr a);
};

/// Names visible to the parser: variables map to evaluation slots, parameters
/// are folded in as constants. "pi" is predefined unless overridden.
struct Scope {
  std::vector<std::string> variables;
  std::map<std::string, double> parameters;

  int slot_of(const std::string& name) const;
};

/// Throws ConfigError with the byte offset of the problem.
ExprPtr parse_expression(const std::string& text, const Scope& scope);

/// Canonical text; parse(print(e)) is structurally equal to e.
std::string print_expression(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

const char* function_name(Expr::Fn f);

template <class T>
T evaluate(const Expr& e, const Vec<T>& vars) {
  switch (e.kind) {
    case Expr::Kind::constant:
      return T(e.value);
    case Expr::Kind::variable:
      return vars[e.slot];
    case Expr::Kind::neg:
      return -evaluate<T>(*e.args[0], vars);
    case Expr::Kind::add:
      return evaluate<T>(*e.args[0], vars) + evaluate<T>(*e.args[1], vars);
    case Expr::Kind::sub:
      return evaluate<T>(*e.args[0], vars) - evaluate<T>(*e.args[1], vars);
    case Expr::Kind::mul:
      return evaluate<T>(*e.args[0], vars) * evaluate<T>(*e.args[1], vars);
    case Expr::Kind::div:
      return evaluate<T>(*e.args[0], vars) / evaluate<T>(*e.args[1], vars);
    case Expr::Kind::pow:
      return ipow(evaluate<T>(*e.args[0], vars), e.exponent);
    case Expr::Kind::call: {
      const T a = evaluate<T>(*e.args[0], vars);
      using std::cos, std::exp, std::sin, std::sqrt;
      switch (e.fn) {
        case Expr::Fn::sin: return sin(a);
        case Expr::Fn::cos: return cos(a);
        case Expr::Fn::exp: return exp(a);
        case Expr::Fn::sqrt: return sqrt(a);
      }
    }
  }
  return T(0.0);
}

/// R^nvars -> R^exprs.size(), one output per expression.
SmoothMap compile(std::vector<ExprPtr> exprs, int nvars, std::string name = {});

}  // namespace distham
