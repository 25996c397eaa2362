#pragma once

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <string>

#include "disloc/core.hpp"

namespace disloc {

/// Compiled scalar expression over the coordinates X1, X2, X3 and time t.
using ScalarExpr = std::function<double(const Vec3&, double)>;

namespace expr_detail {

struct Parser {
  const std::string& src;
  size_t pos = 0;

  explicit Parser(const std::string& s) : src(s) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigParseError("expression \"" + src + "\": " + what + " at column " +
                           std::to_string(pos + 1));
  }

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  ScalarExpr parse() {
    ScalarExpr e = sum();
    skip_ws();
    if (pos != src.size()) fail("unexpected trailing input");
    return e;
  }

  ScalarExpr sum() {
    ScalarExpr lhs = product();
    for (;;) {
      if (eat('+')) {
        ScalarExpr rhs = product();
        lhs = [lhs, rhs](const Vec3& p, double t) { return lhs(p, t) + rhs(p, t); };
      } else if (eat('-')) {
        ScalarExpr rhs = product();
        lhs = [lhs, rhs](const Vec3& p, double t) { return lhs(p, t) - rhs(p, t); };
      } else {
        return lhs;
      }
    }
  }

  ScalarExpr product() {
    ScalarExpr lhs = power();
    for (;;) {
      if (eat('*')) {
        ScalarExpr rhs = power();
        lhs = [lhs, rhs](const Vec3& p, double t) { return lhs(p, t) * rhs(p, t); };
      } else if (eat('/')) {
        ScalarExpr rhs = power();
        lhs = [lhs, rhs](const Vec3& p, double t) { return lhs(p, t) / rhs(p, t); };
      } else {
        return lhs;
      }
    }
  }

  ScalarExpr power() {  // right-associative
    ScalarExpr base = unary();
    if (eat('^')) {
      ScalarExpr exp = power();
      return [base, exp](const Vec3& p, double t) { return std::pow(base(p, t), exp(p, t)); };
    }
    return base;
  }

  ScalarExpr unary() {
    if (eat('-')) {
      ScalarExpr e = unary();
      return [e](const Vec3& p, double t) { return -e(p, t); };
    }
    return primary();
  }

  ScalarExpr primary() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of expression");
    char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    if (eat('(')) {
      ScalarExpr e = sum();
      if (!eat(')')) fail("missing closing parenthesis");
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  ScalarExpr number() {
    size_t start = pos;
    size_t used = 0;
    double v;
    try {
      v = std::stod(src.substr(start), &used);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos = start + used;
    return [v](const Vec3&, double) { return v; };
  }

  ScalarExpr identifier() {
    size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    std::string name = src.substr(start, pos - start);
    if (name == "X1") return [](const Vec3& p, double) { return p[0]; };
    if (name == "X2") return [](const Vec3& p, double) { return p[1]; };
    if (name == "X3") return [](const Vec3& p, double) { return p[2]; };
    if (name == "t") return [](const Vec3&, double t) { return t; };
    if (name == "pi") return [](const Vec3&, double) { return M_PI; };
    if (name == "sin" || name == "cos" || name == "exp") {
      if (!eat('(')) fail("function '" + name + "' needs parentheses");
      ScalarExpr arg = sum();
      if (!eat(')')) fail("missing closing parenthesis");
      if (name == "sin")
        return [arg](const Vec3& p, double t) { return std::sin(arg(p, t)); };
      if (name == "cos")
        return [arg](const Vec3& p, double t) { return std::cos(arg(p, t)); };
      return [arg](const Vec3& p, double t) { return std::exp(arg(p, t)); };
    }
    pos = start;
    fail("unknown symbol '" + name + "'");
  }
};

}  // namespace expr_detail

/// Compiles a minimal arithmetic grammar: + - * / ^, unary minus, sin, cos,
/// exp, coordinates X1 X2 X3, time t, the constant pi, and parentheses.
inline ScalarExpr parse_expression(const std::string& text) {
  expr_detail::Parser p(text);
  return p.parse();
}

}  // namespace disloc
