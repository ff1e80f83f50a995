#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "wdirac/expr.hpp"

using namespace wdirac;

namespace {

double ev(const std::string& text, double x) {
  return expr_eval(*parse_expression(text), x);
}

}  // namespace

TEST_CASE("constant, rational and composite expressions", "[expr]") {
  CHECK(ev("0", 3.7) == 0.0);
  CHECK(ev("1/x", 2.0) == 0.5);
  // sin(3) + 1
  CHECK(ev("sin(3*x)+x^2", 1.0) == Catch::Approx(1.1411200080598672).epsilon(1e-15));
  CHECK(ev("pi", 0.0) == Catch::Approx(kPi));
  CHECK(ev("2*x^2", 3.0) == 18.0);  // ^ binds tighter than *
  CHECK(ev("exp(log(x))", 1.7) == Catch::Approx(1.7));
  CHECK(ev("sqrt(abs(0-x))", 4.0) == 2.0);
  CHECK(ev("tanh(x)", 0.5) == Catch::Approx(std::tanh(0.5)));
  CHECK(ev("-x+1", 0.25) == 0.75);  // leading unary minus extension
  CHECK(ev("1e-3*x", 2.0) == Catch::Approx(2e-3));
}

TEST_CASE("parse errors carry position and expectations", "[expr]") {
  CHECK_THROWS_AS(parse_expression("x^2^3"), ParseError);
  CHECK_THROWS_AS(parse_expression("sin x"), ParseError);
  CHECK_THROWS_AS(parse_expression("(1+x"), ParseError);
  CHECK_THROWS_AS(parse_expression("foo(x)"), ParseError);
  CHECK_THROWS_AS(parse_expression(""), ParseError);
  CHECK_THROWS_AS(parse_expression("1+*2"), ParseError);
  try {
    parse_expression("1 + bar(x)");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
    CHECK(!e.expected().empty());
  }
}

TEST_CASE("domain violations surface at evaluation time with x", "[expr]") {
  auto bad_log = parse_expression("log(0-x)");
  CHECK_THROWS_AS(expr_eval(*bad_log, 1.0), EvalDomainError);
  try {
    expr_eval(*bad_log, 2.5);
  } catch (const EvalDomainError& e) {
    CHECK(e.where() == 2.5);
  }
  CHECK_THROWS_AS(ev("1/x", 0.0), EvalDomainError);
  CHECK_THROWS_AS(ev("sqrt(0-1)", 0.3), EvalDomainError);
  // but parsing alone is fine
  CHECK_NOTHROW(parse_expression("sqrt(0-1)"));
}

namespace {

ExprPtr random_ast(std::mt19937_64& rng, int depth) {
  std::uniform_real_distribution<double> num(-2.0, 2.0);
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
  switch (pick(rng)) {
    case 0:
      return make_number(num(rng));
    case 1:
      return make_node(ExprOp::kVar, nullptr);
    case 2:
      return make_node(ExprOp::kAdd, random_ast(rng, depth - 1),
                       random_ast(rng, depth - 1));
    case 3:
      return make_node(ExprOp::kSub, random_ast(rng, depth - 1),
                       random_ast(rng, depth - 1));
    case 4:
      return make_node(ExprOp::kMul, random_ast(rng, depth - 1),
                       random_ast(rng, depth - 1));
    case 5:
      return make_node(ExprOp::kSin, random_ast(rng, depth - 1));
    case 6:
      return make_node(ExprOp::kCos, random_ast(rng, depth - 1));
    default:
      return make_node(ExprOp::kTanh, random_ast(rng, depth - 1));
  }
}

}  // namespace

TEST_CASE("pretty-print round trip agrees at random points", "[expr]") {
  std::mt19937_64 rng(20240901);
  std::uniform_real_distribution<double> xs(-3.0, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    ExprPtr ast = random_ast(rng, 4);
    std::string text = expr_to_string(*ast);
    ExprPtr back = parse_expression(text);
    for (int i = 0; i < 100; ++i) {
      double x = xs(rng);
      double a = expr_eval(*ast, x);
      double b = expr_eval(*back, x);
      REQUIRE(std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("symbolic derivative matches finite differences", "[expr]") {
  for (const char* text :
       {"sin(3*x)+x^2", "exp(0-x^2)", "x/(1+x^2)", "sqrt(x)", "log(x)",
        "tanh(2*x)", "x^3", "abs(x)*x"}) {
    ExprPtr ast = parse_expression(text);
    ExprPtr d = expr_derivative(ast);
    for (double x : {0.3, 0.9, 1.7}) {
      double h = 1e-6;
      double fd =
          (expr_eval(*ast, x + h) - expr_eval(*ast, x - h)) / (2 * h);
      double sym = expr_eval(*d, x);
      CHECK(std::abs(sym - fd) < 1e-7 * std::max(1.0, std::abs(sym)));
    }
  }
}
