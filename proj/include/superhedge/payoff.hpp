#pragma once

#include <span>
#include <string>
#include <vector>

#include "superhedge/common.hpp"

namespace superhedge {

// Arithmetic payoff expression over path coordinates x[t][n] (1-based time
// and asset indices). Immutable after parsing; evaluation is pure.
struct PayoffExpr {
  enum class Op : unsigned char {
    literal,
    variable,  // x[t][n]
    add,
    sub,
    mul,
    div,
    neg,
    fmax,
    fmin,
    fabs,
    fpos,  // pos(y) = max(y, 0)
    fpowi  // powi(y, k), integer k >= 0
  };

  struct Node {
    Op op = Op::literal;
    double value = 0.0;  // literal
    int t = 0, n = 0;    // variable indices
    int a = -1, b = -1;  // children
    int exponent = 0;    // powi
  };

  std::vector<Node> nodes;
  int root = -1;

  bool empty() const { return root < 0; }
};

// Parses the standard grammar: + - * /, unary minus, parentheses,
// max(a,b), min(a,b), abs(a), pos(a), powi(a, k). Throws ParseError with the
// byte offset of the failure; unknown identifiers are rejected.
PayoffExpr parse_payoff(const std::string& text);

// Checks every variable index against model dimensions (1 <= t <= periods,
// 1 <= n <= assets); throws ValidationError naming the offending variable.
void bind_payoff(const PayoffExpr& e, int assets, int periods);

// Evaluates on a path stored row-major: coordinate (t, n) at
// path[(t-1)*assets + (n-1)]. Throws EvalError on division by zero,
// identifying the offending node.
double evaluate(const PayoffExpr& e, std::span<const double> path, int assets);

// Canonical text form; parse(print(parse(s))) is structurally identical to
// parse(s).
std::string to_string(const PayoffExpr& e);

bool structurally_equal(const PayoffExpr& a, const PayoffExpr& b);

}  // namespace superhedge
