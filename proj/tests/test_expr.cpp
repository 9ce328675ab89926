#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "kktcert/expr.hpp"
#include "test_util.hpp"

using namespace kktcert;
using kktcert::testing::max_relative_gradient_error;
using kktcert::testing::random_point;
using kktcert::testing::random_polynomial;
using kktcert::testing::random_smooth_expr;

TEST_CASE("parse builds the expected trees") {
  Expr e = parse_expr("1 - x1*x2", 2);
  REQUIRE(e.kind() == NodeKind::kSub);
  CHECK(e.operand(0).kind() == NodeKind::kConstant);
  CHECK(e.operand(0).constant_value() == 1.0);
  REQUIRE(e.operand(1).kind() == NodeKind::kMul);
  CHECK(e.operand(1).operand(0).variable_index() == 1);
  CHECK(e.operand(1).operand(1).variable_index() == 2);

  Expr v = parse_expr("x1", 1);
  CHECK(v.kind() == NodeKind::kVariable);
  CHECK(v.variable_index() == 1);
}

TEST_CASE("precedence: pow binds tighter than unary minus, * over +") {
  Expr e = parse_expr("-x1^2", 1);
  REQUIRE(e.kind() == NodeKind::kNeg);
  CHECK(e.operand(0).kind() == NodeKind::kPow);
  CHECK(e.operand(0).exponent() == 2);

  Expr f = parse_expr("1+2*x1", 1);
  REQUIRE(f.kind() == NodeKind::kAdd);
  CHECK(f.operand(1).kind() == NodeKind::kMul);

  // left associativity
  Expr g = parse_expr("4 - 2 - 1", 1);
  CHECK(evaluate(g, Vec{0.0}) == 1.0);

  // unary minus binds tighter than *
  Expr h = parse_expr("-x1*x2", 2);
  REQUIRE(h.kind() == NodeKind::kMul);
  CHECK(h.operand(0).kind() == NodeKind::kNeg);
}

TEST_CASE("parse errors carry byte offsets") {
  CHECK_THROWS_AS(parse_expr("x3", 2), ParseError);
  try {
    parse_expr("1 + @", 1);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
  try {
    parse_expr("x3 + 1", 2);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("out of range") != std::string::npos);
    CHECK(e.offset() == 0);
  }
  CHECK_THROWS_AS(parse_expr("x0", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("x1^2.5", 1), ParseError);
  CHECK_THROWS_AS(parse_expr("x1^x2", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("(x1", 1), ParseError);
  CHECK_THROWS_AS(parse_expr("x1 x2", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("sin(x1)", 1), ParseError);
  CHECK_THROWS_AS(parse_expr("", 1), ParseError);
}

TEST_CASE("evaluate follows IEEE arithmetic and rejects domain violations") {
  Expr e = parse_expr("1 - x1*x2", 2);
  CHECK(evaluate(e, Vec{1.0, 1.0}) == 0.0);
  CHECK(evaluate(e, Vec{2.0, 3.0}) == -5.0);

  Expr lg = parse_expr("log(x1)", 1);
  CHECK_THROWS_AS(evaluate(lg, Vec{0.0}), EvalDomainError);
  CHECK_THROWS_AS(evaluate(lg, Vec{-1.0}), EvalDomainError);

  CHECK_THROWS_AS(evaluate(parse_expr("1/x1", 1), Vec{0.0}), EvalDomainError);
  CHECK_THROWS_AS(evaluate(parse_expr("sqrt(x1)", 1), Vec{-1.0}),
                  EvalDomainError);
  CHECK_THROWS_AS(evaluate(parse_expr("x1^-1", 1), Vec{0.0}), EvalDomainError);

  // integer exponents, including negatives
  CHECK(evaluate(parse_expr("x1^3", 1), Vec{2.0}) == 8.0);
  CHECK(evaluate(parse_expr("x1^-2", 1), Vec{2.0}) == 0.25);
  CHECK(evaluate(parse_expr("x1^0", 1), Vec{0.0}) == 1.0);

  // the domain error names the offending node
  try {
    evaluate(parse_expr("1 + log(x1 - 2)", 1), Vec{1.0});
    FAIL("expected EvalDomainError");
  } catch (const EvalDomainError& err) {
    CHECK(err.node().find("log") != std::string::npos);
  }
}

TEST_CASE("gradient matches hand derivatives") {
  GradientVector g = gradient(parse_expr("1 - x1*x2", 2), Vec{2.0, 3.0});
  CHECK(g.value == -5.0);
  CHECK(g.grad[0] == -3.0);
  CHECK(g.grad[1] == -2.0);

  GradientVector h = gradient(parse_expr("x1^2", 1), Vec{0.0});
  CHECK(h.value == 0.0);
  CHECK(h.grad[0] == 0.0);
}

TEST_CASE("gradient value equals evaluate exactly") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 1 + static_cast<int>(rng.next_u64() % 3);
    Expr e = random_smooth_expr(rng, n);
    Vec x = random_point(rng, n);
    double ev;
    try {
      ev = evaluate(e, x);
    } catch (const EvalDomainError&) {
      continue;
    }
    GradientVector g = gradient(e, x);
    CHECK(g.value == ev);  // bit-exact: same evaluation path
  }
}

TEST_CASE("gradient agrees with central differences on 1000 random expressions") {
  SplitMix64 rng(42);
  double worst = 0.0;
  int tested = 0;
  while (tested < 1000) {
    int n = 1 + static_cast<int>(rng.next_u64() % 3);
    Expr e = random_smooth_expr(rng, n);
    Vec x = random_point(rng, n);
    try {
      worst = std::max(worst, max_relative_gradient_error(e, x));
    } catch (const EvalDomainError&) {
      continue;
    }
    ++tested;
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("print round-trips structurally") {
  const char* cases[] = {
      "1 - x1*x2", "x1", "-x1^2", "exp(x1) + log(x2)/sqrt(x1+1)",
      "1.5e-3*x1 - 2/x2", "(x1 - 5)^2", "x1^-3 + 0.25", "-(x1 + x2)*x1",
  };
  for (const char* s : cases) {
    Expr once = parse_expr(s, 2);
    Expr twice = parse_expr(print_expr(once), 2);
    CHECK(structurally_equal(once, twice));
  }

  // Hand-built trees may hold negative constants, which the grammar spells
  // as a negation; the idempotence property quantifies over strings.
  SplitMix64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::string s = print_expr(random_smooth_expr(rng, 3));
    Expr once = parse_expr(s, 3);
    Expr twice = parse_expr(print_expr(once), 3);
    CHECK(structurally_equal(once, twice));
  }
}

TEST_CASE("max_variable_index") {
  CHECK(max_variable_index(parse_expr("1 + 2", 1)) == 0);
  CHECK(max_variable_index(parse_expr("x1*x3", 3)) == 3);
}
