#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "disloc/expr.hpp"

using namespace disloc;

TEST_CASE("arithmetic and precedence") {
  Vec3 p(2.0, 3.0, 5.0);
  CHECK(parse_expression("1 + 2 * 3")(p, 0.0) == doctest::Approx(7.0));
  CHECK(parse_expression("(1 + 2) * 3")(p, 0.0) == doctest::Approx(9.0));
  CHECK(parse_expression("2 ^ 3 ^ 2")(p, 0.0) == doctest::Approx(512.0));  // right-assoc
  CHECK(parse_expression("-(2 ^ 2)")(p, 0.0) == doctest::Approx(-4.0));
  CHECK(parse_expression("-2 ^ 2")(p, 0.0) == doctest::Approx(4.0));  // unary binds tighter
  CHECK(parse_expression("10 / 4")(p, 0.0) == doctest::Approx(2.5));
  CHECK(parse_expression("1 - 2 - 3")(p, 0.0) == doctest::Approx(-4.0));
}

TEST_CASE("symbols and functions") {
  Vec3 p(2.0, 3.0, 5.0);
  CHECK(parse_expression("X1 * X2 + X3")(p, 0.0) == doctest::Approx(11.0));
  CHECK(parse_expression("t")(p, 1.25) == doctest::Approx(1.25));
  CHECK(parse_expression("sin(pi / 2)")(p, 0.0) == doctest::Approx(1.0));
  CHECK(parse_expression("cos(0)")(p, 0.0) == doctest::Approx(1.0));
  CHECK(parse_expression("exp(1)")(p, 0.0) == doctest::Approx(std::exp(1.0)));
  CHECK(parse_expression("0.1 * X1 * sin(t)")(p, M_PI / 2.0) == doctest::Approx(0.2));
  CHECK(parse_expression("exp(-2 * 0.5 * X3)")(p, 0.0) ==
        doctest::Approx(std::exp(-5.0)));
}

TEST_CASE("parse errors carry a column diagnostic") {
  auto message_of = [](const std::string& src) {
    try {
      parse_expression(src);
    } catch (const ConfigParseError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK_THROWS_AS(parse_expression("1 +"), ConfigParseError);
  CHECK_THROWS_AS(parse_expression("(1 + 2"), ConfigParseError);
  CHECK_THROWS_AS(parse_expression("foo + 1"), ConfigParseError);
  CHECK_THROWS_AS(parse_expression("sin 1"), ConfigParseError);
  CHECK_THROWS_AS(parse_expression("1 2"), ConfigParseError);
  CHECK(message_of("1 +").find("column") != std::string::npos);
  CHECK(message_of("foo + 1").find("foo") != std::string::npos);
  CHECK(message_of("(1 + 2").find("parenthesis") != std::string::npos);
}

TEST_CASE("whitespace and unary minus chains") {
  Vec3 p(1.0, 0.0, 0.0);
  CHECK(parse_expression("  - - 3 ")(p, 0.0) == doctest::Approx(3.0));
  CHECK(parse_expression("2*-3")(p, 0.0) == doctest::Approx(-6.0));
}
