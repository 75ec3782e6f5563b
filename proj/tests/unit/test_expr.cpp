#include <gtest/gtest.h>

#include <random>

#include "cpnkit/error.hpp"
#include "cpnkit/expr.hpp"
#include "support.hpp"

using namespace cpn;

namespace {

Expr lit(Int v) { return Expr::literal(Value::integer(v)); }

ErrorCode eval_error(const std::string& text, const Env& env = {}, const std::string& funs = "") {
  try {
    evaluate(parse_expression(text), env, parse_function_definitions(funs));
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << text << " evaluated without error";
  return ErrorCode::IoError;
}

Value eval(const std::string& text, const Env& env = {}, const std::string& funs = "") {
  return evaluate(parse_expression(text), env, parse_function_definitions(funs));
}

}  // namespace

TEST(Parse, Guard) { EXPECT_EQ(parse_expression("x > 0"), Expr::binary(BinaryOp::Gt, Expr::var("x"), lit(0))); }

TEST(Parse, CallAndTuple) {
  EXPECT_EQ(parse_expression("double(x)"), Expr::call("double", {Expr::var("x")}));
  EXPECT_EQ(parse_expression("(x, y)"), Expr::tuple(Expr::var("x"), Expr::var("y")));
  EXPECT_EQ(parse_expression("f()"), Expr::call("f", {}));
}

TEST(Parse, Precedence) {
  EXPECT_EQ(parse_expression("1 + 2 * 3"),
            Expr::binary(BinaryOp::Add, lit(1), Expr::binary(BinaryOp::Mul, lit(2), lit(3))));
  EXPECT_EQ(parse_expression("a or b and not c"),
            Expr::binary(BinaryOp::Or, Expr::var("a"),
                         Expr::binary(BinaryOp::And, Expr::var("b"), Expr::unary(UnaryOp::Not, Expr::var("c")))));
  EXPECT_EQ(parse_expression("10 - 4 - 3"),
            Expr::binary(BinaryOp::Sub, Expr::binary(BinaryOp::Sub, lit(10), lit(4)), lit(3)));
}

TEST(Parse, Literals) {
  EXPECT_EQ(parse_expression("2.5"), Expr::literal(Value::real(2.5)));
  EXPECT_EQ(parse_expression("\"a\\\"b\\n\""), Expr::literal(Value::text("a\"b\n")));
  EXPECT_EQ(parse_expression("true"), Expr::literal(Value::boolean(true)));
}

TEST(Parse, SyntaxErrors) {
  for (const char* bad : {"x >", "", "(1, 2", "1 +* 2", "f(,)", "\"open", "1 < 2 < 3", "x @+ 1"}) {
    try {
      parse_expression(bad);
      ADD_FAILURE() << "accepted '" << bad << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::SyntaxError) << bad;
    }
  }
}

TEST(Inscription, Delay) {
  const auto a = parse_arc_inscription("double(x) @+2");
  EXPECT_EQ(a.body, Expr::call("double", {Expr::var("x")}));
  ASSERT_TRUE(a.delay);
  EXPECT_EQ(*a.delay, lit(2));
  const auto b = parse_arc_inscription("x");
  EXPECT_FALSE(b.delay);
  EXPECT_EQ(*parse_arc_inscription("x @+0").delay, lit(0));
  try {
    parse_arc_inscription("x @+");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DelaySyntaxError);
  }
}

TEST(Evaluate, PaperExamples) {
  EXPECT_EQ(eval("double(x)", {{"x", Value::integer(1)}}, "fun double(n) = n * 2;"), Value::integer(2));
  EXPECT_EQ(eval("x > 0", {{"x", Value::integer(-1)}}), Value::boolean(false));
  EXPECT_EQ(eval("1 + 2 * 3"), Value::integer(7));
}

TEST(Evaluate, Arithmetic) {
  EXPECT_EQ(eval("7 / 2"), Value::integer(3));
  EXPECT_EQ(eval("-7 / 2"), Value::integer(-3));
  EXPECT_EQ(eval("7 mod 3"), Value::integer(1));
  EXPECT_EQ(eval("1 + 0.5"), Value::real(1.5));
  EXPECT_EQ(eval("\"ab\" + \"c\""), Value::text("abc"));
  EXPECT_EQ(eval("(1, \"a\") == (1, \"a\")"), Value::boolean(true));
  EXPECT_EQ(eval("not (1 < 2) or 3 >= 3"), Value::boolean(true));
}

TEST(Evaluate, Errors) {
  EXPECT_EQ(eval_error("y + 1"), ErrorCode::UnboundVariable);
  EXPECT_EQ(eval_error("g(1)"), ErrorCode::UnknownFunction);
  EXPECT_EQ(eval_error("double(1, 2)", {}, "fun double(n) = n * 2;"), ErrorCode::ArityMismatch);
  EXPECT_EQ(eval_error("\"a\" + 1"), ErrorCode::TypeErrorAtRuntime);
  EXPECT_EQ(eval_error("1 / 0"), ErrorCode::DivisionByZero);
  EXPECT_EQ(eval_error("1 mod 0"), ErrorCode::DivisionByZero);
  EXPECT_EQ(eval_error("9223372036854775807 + 1"), ErrorCode::ArithmeticOverflow);
  EXPECT_EQ(eval_error("1 < \"a\""), ErrorCode::TypeErrorAtRuntime);
}

// Without conditionals a recursive definition never reaches a base case, so the
// only observable outcome of fact(5) is the depth limit.
TEST(Evaluate, RecursionHitsDepthLimit) {
  EXPECT_EQ(eval_error("fact(5)", {}, "fun fact(n) = n * fact(n - 1);"), ErrorCode::RecursionLimitExceeded);
}

TEST(Evaluate, NestedCallsAgreeWithIterativeProduct) {
  // A fixed-depth unrolled product stands in for factorial.
  const std::string funs = "fun f1(n) = n; fun f2(n) = n * f1(n - 1); fun f3(n) = n * f2(n - 1);"
                           " fun f4(n) = n * f3(n - 1); fun f5(n) = n * f4(n - 1);";
  Int expected = 1;
  for (Int i = 1; i <= 5; ++i) expected *= i;
  EXPECT_EQ(eval("f5(5)", {}, funs), Value::integer(expected));
}

TEST(Evaluate, Deterministic) {
  const Env env{{"x", Value::integer(4)}};
  EXPECT_EQ(eval("x * x - 3", env), eval("x * x - 3", env));
}

TEST(FreeVariables, Examples) {
  EXPECT_EQ(free_variables(parse_expression("x > 0")), std::set<std::string>{"x"});
  EXPECT_EQ(free_variables(parse_expression("double(x)")), std::set<std::string>{"x"});
  EXPECT_TRUE(free_variables(parse_expression("3")).empty());
  EXPECT_EQ(free_variables(parse_expression("(a, f(b, a + c))")), (std::set<std::string>{"a", "b", "c"}));
}

TEST(FreeVariables, BindingThemSuffices) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const Expr e = cpntest::random_expr(rng, 3);
    Env env;
    for (const auto& v : free_variables(e)) env[v] = Value::integer(1);
    try {
      evaluate(e, env, {});
    } catch (const Error& err) {
      EXPECT_NE(err.code(), ErrorCode::UnboundVariable) << pretty_print(e);
    }
  }
}

TEST(Match, Examples) {
  const auto r1 = match_pattern(Expr::var("x"), Value::integer(1), {});
  ASSERT_TRUE(r1);
  EXPECT_EQ(r1->at("x"), Value::integer(1));
  EXPECT_FALSE(match_pattern(Expr::tuple(Expr::var("x"), Expr::var("x")),
                             Value::pair(Value::enumerated("C", "red"), Value::enumerated("C", "blue")), {}));
  const Env partial{{"y", Value::integer(2)}};
  EXPECT_EQ(match_pattern(lit(5), Value::integer(5), partial), partial);
  EXPECT_FALSE(match_pattern(lit(5), Value::integer(6), partial));
  EXPECT_FALSE(match_pattern(Expr::var("y"), Value::integer(3), partial));
  try {
    match_pattern(parse_expression("x + 1"), Value::integer(2), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAPattern);
  }
}

TEST(Match, EvaluateInvertsMatch) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    int fresh = 0;
    std::function<std::pair<Expr, Value>(int)> gen = [&](int depth) -> std::pair<Expr, Value> {
      const int r = std::uniform_int_distribution<int>(0, depth > 0 ? 2 : 1)(rng);
      if (r == 0) return {Expr::var("v" + std::to_string(fresh++)), Value::integer(static_cast<Int>(rng() % 10))};
      if (r == 1) {
        const Value v = Value::text(std::string(1, static_cast<char>('a' + rng() % 3)));
        return {Expr::literal(v), v};
      }
      auto [a, va] = gen(depth - 1);
      auto [b, vb] = gen(depth - 1);
      return {Expr::tuple(a, b), Value::pair(va, vb)};
    };
    const auto [pattern, value] = gen(3);
    const auto env = match_pattern(pattern, value, {});
    ASSERT_TRUE(env) << pretty_print(pattern);
    EXPECT_EQ(evaluate(pattern, *env, {}), value);
  }
}

TEST(Functions, Definitions) {
  const auto table = parse_function_definitions("fun double(n) = n * 2;");
  ASSERT_EQ(table.size(), 1u);
  EXPECT_EQ(table.find("double")->params, std::vector<std::string>{"n"});
  EXPECT_EQ(evaluate(parse_expression("double(1)"), {}, table), Value::integer(2));
  EXPECT_TRUE(parse_function_definitions("").empty());
  try {
    parse_function_definitions("fun f(a) = a; fun f(b) = b;");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateFunction);
  }
  try {
    parse_function_definitions("fun f(a, a) = a;");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
  }
}

TEST(Functions, BodiesAreClosed) {
  EXPECT_EQ(eval_error("f(1)", {{"x", Value::integer(1)}}, "fun f(n) = n + x;"), ErrorCode::UnboundVariable);
}

TEST(PrettyPrint, Examples) {
  EXPECT_EQ(pretty_print(Expr::binary(BinaryOp::Gt, Expr::var("x"), lit(0))), "x > 0");
  EXPECT_EQ(pretty_print(parse_expression("(1+2)*3")), "(1 + 2) * 3");
  EXPECT_EQ(pretty_print(parse_expression("1 - (2 - 3)")), "1 - (2 - 3)");
  EXPECT_EQ(pretty_print(parse_arc_inscription("double(x)@+2")), "double(x) @+2");
  EXPECT_EQ(pretty_print(Expr::unary(UnaryOp::Neg, lit(1))), "-(1)");
}

TEST(PrettyPrint, RandomRoundTrip) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 1000; ++i) {
    const Expr e = cpntest::random_expr(rng, 4);
    const std::string text = pretty_print(e);
    EXPECT_EQ(parse_expression(text), e) << text;
  }
}
