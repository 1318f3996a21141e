#include "superhedge/payoff.hpp"

#include <random>
#include <vector>

#include "doctest.h"

using namespace superhedge;

namespace {
double eval(const std::string& text, std::vector<double> path, int assets) {
  return evaluate(parse_payoff(text), path, assets);
}
}  // namespace

TEST_CASE("squared increment and straddle payoffs parse and evaluate") {
  CHECK(eval("powi(x[2][1]-x[1][1], 2)", {1.0, 2.0}, 1) == 1.0);
  CHECK(eval("abs(x[2][1]-x[1][1])", {2.0, 2.0}, 1) == 0.0);
  CHECK(eval("pos(x[1][1]-0.5)", {2.0, 7.0}, 1) == 1.5);
}

TEST_CASE("grammar corners") {
  CHECK(eval("1 + 2 * 3", {}, 1) == 7.0);
  CHECK(eval("(1 + 2) * 3", {}, 1) == 9.0);
  CHECK(eval("-x[1][1] + 4", {1.5}, 1) == 2.5);
  CHECK(eval("2 - 3 - 4", {}, 1) == -5.0);
  CHECK(eval("12 / 4 / 3", {}, 1) == 1.0);
  CHECK(eval("min(max(1, 2), abs(-5))", {}, 1) == 2.0);
  CHECK(eval("powi(2, 0)", {}, 1) == 1.0);
  CHECK(eval("  powi( x[1][2] , 3 ) ", {0.0, 2.0}, 2) == 8.0);
}

TEST_CASE("syntax errors carry a byte offset") {
  CHECK_THROWS_AS(parse_payoff("1 + "), ParseError);
  CHECK_THROWS_AS(parse_payoff("foo(1)"), ParseError);
  CHECK_THROWS_AS(parse_payoff("x[1]"), ParseError);
  CHECK_THROWS_AS(parse_payoff("powi(2, -1)"), ParseError);
  CHECK_THROWS_AS(parse_payoff("1 2"), ParseError);
  try {
    parse_payoff("1 + @");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
}

TEST_CASE("binding validates indices against the model dimensions") {
  auto e = parse_payoff("x[3][1]");
  CHECK_THROWS_AS(bind_payoff(e, 1, 2), ValidationError);
  CHECK_NOTHROW(bind_payoff(e, 1, 3));
  auto f = parse_payoff("x[1][2]");
  CHECK_THROWS_AS(bind_payoff(f, 1, 2), ValidationError);
  CHECK_NOTHROW(bind_payoff(f, 2, 2));
}

TEST_CASE("division by zero reports an evaluation error") {
  auto e = parse_payoff("1 / (x[1][1] - 1)");
  CHECK_THROWS_AS(evaluate(e, std::vector<double>{1.0}, 1), EvalError);
  CHECK(evaluate(e, std::vector<double>{3.0}, 1) == 0.5);
}

TEST_CASE("print-parse fixed point on handwritten expressions") {
  const char* cases[] = {
      "powi(x[2][1]-x[1][1], 2)",
      "abs(x[2][1]-x[1][1])",
      "-(x[1][1]+2)*3 - 4/(1+x[2][1])",
      "max(x[1][1], min(x[2][1], 0.25)) + pos(-x[1][1])",
      "1 - (2 - 3)",
      "2 / (3 / 4)",
      "-(-(x[1][1]))",
  };
  for (const char* s : cases) {
    auto e1 = parse_payoff(s);
    auto printed = to_string(e1);
    auto e2 = parse_payoff(printed);
    INFO("source: ", s, " printed: ", printed);
    CHECK(structurally_equal(e1, e2));
    CHECK(to_string(e2) == printed);
  }
}

namespace {
// random AST generator for the printer round-trip property
int random_node(PayoffExpr& e, std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
  // literals are nonnegative: a leading '-' always parses as negation, so
  // negative literal nodes are unreachable from the parser
  std::uniform_real_distribution<double> lit(0.0, 3.0);
  auto add = [&](PayoffExpr::Node n) {
    e.nodes.push_back(n);
    return static_cast<int>(e.nodes.size()) - 1;
  };
  switch (pick(rng)) {
    case 0:
      return add({PayoffExpr::Op::literal, std::round(lit(rng) * 8) / 8, 0, 0,
                  -1, -1, 0});
    case 1:
      return add({PayoffExpr::Op::variable, 0, 1 + static_cast<int>(rng() % 2),
                  1 + static_cast<int>(rng() % 2), -1, -1, 0});
    case 2:
    case 3:
    case 4:
    case 5: {
      const PayoffExpr::Op ops[] = {PayoffExpr::Op::add, PayoffExpr::Op::sub,
                                    PayoffExpr::Op::mul, PayoffExpr::Op::div};
      int a = random_node(e, rng, depth - 1);
      int b = random_node(e, rng, depth - 1);
      return add({ops[rng() % 4], 0, 0, 0, a, b, 0});
    }
    case 6: {
      int a = random_node(e, rng, depth - 1);
      return add({PayoffExpr::Op::neg, 0, 0, 0, a, -1, 0});
    }
    case 7: {
      int a = random_node(e, rng, depth - 1);
      int b = random_node(e, rng, depth - 1);
      return add({rng() % 2 ? PayoffExpr::Op::fmax : PayoffExpr::Op::fmin, 0, 0,
                  0, a, b, 0});
    }
    case 8: {
      int a = random_node(e, rng, depth - 1);
      return add({rng() % 2 ? PayoffExpr::Op::fabs : PayoffExpr::Op::fpos, 0, 0,
                  0, a, -1, 0});
    }
    default: {
      int a = random_node(e, rng, depth - 1);
      return add({PayoffExpr::Op::fpowi, 0, 0, 0, a, -1,
                  static_cast<int>(rng() % 4)});
    }
  }
}
}  // namespace

TEST_CASE("print-parse fixed point on random trees") {
  std::mt19937_64 rng(314159);
  for (int k = 0; k < 200; ++k) {
    PayoffExpr e;
    e.root = random_node(e, rng, 4);
    const std::string printed = to_string(e);
    CAPTURE(printed);
    PayoffExpr back = parse_payoff(printed);
    CHECK(structurally_equal(e, back));
    CHECK(to_string(back) == printed);
  }
}

TEST_CASE("evaluation is deterministic on division-free expressions") {
  auto e = parse_payoff("max(x[1][1], x[2][1]) * abs(x[2][1] - 1) + powi(x[1][1], 3)");
  std::vector<double> path{1.25, 0.75};
  const double v1 = evaluate(e, path, 1);
  const double v2 = evaluate(e, path, 1);
  CHECK(v1 == v2);
}
