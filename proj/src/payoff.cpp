#include "superhedge/payoff.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>

namespace superhedge {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  PayoffExpr run() {
    PayoffExpr e;
    e.root = parse_expr(e);
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("payoff parse error at byte " + std::to_string(pos_) +
                         ": " + what,
                     pos_);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  int add(PayoffExpr& e, PayoffExpr::Node n) {
    e.nodes.push_back(n);
    return static_cast<int>(e.nodes.size()) - 1;
  }

  int parse_expr(PayoffExpr& e) {
    int lhs = parse_term(e);
    for (;;) {
      skip_ws();
      if (eat('+')) {
        int rhs = parse_term(e);
        lhs = add(e, {PayoffExpr::Op::add, 0, 0, 0, lhs, rhs, 0});
      } else if (eat('-')) {
        int rhs = parse_term(e);
        lhs = add(e, {PayoffExpr::Op::sub, 0, 0, 0, lhs, rhs, 0});
      } else {
        return lhs;
      }
    }
  }

  int parse_term(PayoffExpr& e) {
    int lhs = parse_factor(e);
    for (;;) {
      skip_ws();
      if (eat('*')) {
        int rhs = parse_factor(e);
        lhs = add(e, {PayoffExpr::Op::mul, 0, 0, 0, lhs, rhs, 0});
      } else if (eat('/')) {
        int rhs = parse_factor(e);
        lhs = add(e, {PayoffExpr::Op::div, 0, 0, 0, lhs, rhs, 0});
      } else {
        return lhs;
      }
    }
  }

  int parse_factor(PayoffExpr& e) {
    skip_ws();
    if (eat('-')) {
      int inner = parse_factor(e);
      return add(e, {PayoffExpr::Op::neg, 0, 0, 0, inner, -1, 0});
    }
    return parse_primary(e);
  }

  long parse_int() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    if (pos_ == start) fail("expected integer");
    return std::strtol(s_.c_str() + start, nullptr, 10);
  }

  int parse_primary(PayoffExpr& e) {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];

    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad numeric literal");
      pos_ += static_cast<std::size_t>(end - begin);
      return add(e, {PayoffExpr::Op::literal, v, 0, 0, -1, -1, 0});
    }

    if (eat('(')) {
      int inner = parse_expr(e);
      expect(')');
      return inner;
    }

    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string ident = s_.substr(start, pos_ - start);

      if (ident == "x") {
        expect('[');
        const long t = parse_int();
        expect(']');
        expect('[');
        const long n = parse_int();
        expect(']');
        if (t < 1 || n < 1) fail("path indices are 1-based");
        return add(e, {PayoffExpr::Op::variable, 0, static_cast<int>(t),
                       static_cast<int>(n), -1, -1, 0});
      }
      if (ident == "max" || ident == "min") {
        expect('(');
        int a = parse_expr(e);
        expect(',');
        int b = parse_expr(e);
        expect(')');
        return add(e, {ident == "max" ? PayoffExpr::Op::fmax
                                      : PayoffExpr::Op::fmin,
                       0, 0, 0, a, b, 0});
      }
      if (ident == "abs" || ident == "pos") {
        expect('(');
        int a = parse_expr(e);
        expect(')');
        return add(e, {ident == "abs" ? PayoffExpr::Op::fabs
                                      : PayoffExpr::Op::fpos,
                       0, 0, 0, a, -1, 0});
      }
      if (ident == "powi") {
        expect('(');
        int a = parse_expr(e);
        expect(',');
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '-') fail("powi exponent must be >= 0");
        const long k = parse_int();
        expect(')');
        return add(e, {PayoffExpr::Op::fpowi, 0, 0, 0, a, -1,
                       static_cast<int>(k)});
      }
      pos_ = start;
      fail("unknown identifier '" + ident + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

int precedence(PayoffExpr::Op op) {
  switch (op) {
    case PayoffExpr::Op::add:
    case PayoffExpr::Op::sub:
      return 1;
    case PayoffExpr::Op::mul:
    case PayoffExpr::Op::div:
      return 2;
    case PayoffExpr::Op::neg:
      return 3;
    default:
      return 4;  // atoms and function calls never need parentheses
  }
}

void print_node(const PayoffExpr& e, int idx, std::ostringstream& os) {
  const auto& n = e.nodes[idx];
  auto child = [&](int c, bool needs_paren) {
    if (needs_paren) os << '(';
    print_node(e, c, os);
    if (needs_paren) os << ')';
  };
  switch (n.op) {
    case PayoffExpr::Op::literal: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      os << buf;
      break;
    }
    case PayoffExpr::Op::variable:
      os << "x[" << n.t << "][" << n.n << "]";
      break;
    // right children wrap at equal precedence so reparsing rebuilds the same
    // association, not just the same value
    case PayoffExpr::Op::add:
      child(n.a, precedence(e.nodes[n.a].op) < 1);
      os << " + ";
      child(n.b, precedence(e.nodes[n.b].op) <= 1);
      break;
    case PayoffExpr::Op::sub:
      child(n.a, precedence(e.nodes[n.a].op) < 1);
      os << " - ";
      child(n.b, precedence(e.nodes[n.b].op) <= 1);
      break;
    case PayoffExpr::Op::mul:
      child(n.a, precedence(e.nodes[n.a].op) < 2);
      os << " * ";
      child(n.b, precedence(e.nodes[n.b].op) <= 2);
      break;
    case PayoffExpr::Op::div:
      child(n.a, precedence(e.nodes[n.a].op) < 2);
      os << " / ";
      child(n.b, precedence(e.nodes[n.b].op) <= 2);
      break;
    case PayoffExpr::Op::neg:
      os << '-';
      child(n.a, precedence(e.nodes[n.a].op) < 3);
      break;
    case PayoffExpr::Op::fmax:
    case PayoffExpr::Op::fmin:
      os << (n.op == PayoffExpr::Op::fmax ? "max(" : "min(");
      print_node(e, n.a, os);
      os << ", ";
      print_node(e, n.b, os);
      os << ')';
      break;
    case PayoffExpr::Op::fabs:
    case PayoffExpr::Op::fpos:
      os << (n.op == PayoffExpr::Op::fabs ? "abs(" : "pos(");
      print_node(e, n.a, os);
      os << ')';
      break;
    case PayoffExpr::Op::fpowi:
      os << "powi(";
      print_node(e, n.a, os);
      os << ", " << n.exponent << ')';
      break;
  }
}

double eval_node(const PayoffExpr& e, int idx, std::span<const double> path,
                 int assets) {
  const auto& n = e.nodes[idx];
  switch (n.op) {
    case PayoffExpr::Op::literal:
      return n.value;
    case PayoffExpr::Op::variable: {
      const std::size_t k =
          static_cast<std::size_t>(n.t - 1) * assets + (n.n - 1);
      if (k >= path.size())
        throw EvalError("path coordinate x[" + std::to_string(n.t) + "][" +
                        std::to_string(n.n) + "] outside the supplied path");
      return path[k];
    }
    case PayoffExpr::Op::add:
      return eval_node(e, n.a, path, assets) + eval_node(e, n.b, path, assets);
    case PayoffExpr::Op::sub:
      return eval_node(e, n.a, path, assets) - eval_node(e, n.b, path, assets);
    case PayoffExpr::Op::mul:
      return eval_node(e, n.a, path, assets) * eval_node(e, n.b, path, assets);
    case PayoffExpr::Op::div: {
      const double denom = eval_node(e, n.b, path, assets);
      if (denom == 0.0)
        throw EvalError("division by zero in payoff node " + std::to_string(idx));
      return eval_node(e, n.a, path, assets) / denom;
    }
    case PayoffExpr::Op::neg:
      return -eval_node(e, n.a, path, assets);
    case PayoffExpr::Op::fmax:
      return std::max(eval_node(e, n.a, path, assets),
                      eval_node(e, n.b, path, assets));
    case PayoffExpr::Op::fmin:
      return std::min(eval_node(e, n.a, path, assets),
                      eval_node(e, n.b, path, assets));
    case PayoffExpr::Op::fabs:
      return std::fabs(eval_node(e, n.a, path, assets));
    case PayoffExpr::Op::fpos:
      return std::max(eval_node(e, n.a, path, assets), 0.0);
    case PayoffExpr::Op::fpowi: {
      double base = eval_node(e, n.a, path, assets);
      double r = 1.0;
      for (int k = 0; k < n.exponent; ++k) r *= base;
      return r;
    }
  }
  throw EvalError("corrupt payoff node");
}

}  // namespace

PayoffExpr parse_payoff(const std::string& text) {
  Parser p(text);
  return p.run();
}

void bind_payoff(const PayoffExpr& e, int assets, int periods) {
  for (const auto& n : e.nodes) {
    if (n.op != PayoffExpr::Op::variable) continue;
    if (n.t < 1 || n.t > periods || n.n < 1 || n.n > assets) {
      throw ValidationError("payoff variable x[" + std::to_string(n.t) + "][" +
                            std::to_string(n.n) + "] out of range for " +
                            std::to_string(assets) + " asset(s), " +
                            std::to_string(periods) + " period(s)");
    }
  }
}

double evaluate(const PayoffExpr& e, std::span<const double> path, int assets) {
  if (e.empty()) throw EvalError("empty payoff expression");
  return eval_node(e, e.root, path, assets);
}

std::string to_string(const PayoffExpr& e) {
  if (e.empty()) return {};
  std::ostringstream os;
  print_node(e, e.root, os);
  return os.str();
}

namespace {
bool node_equal(const PayoffExpr& x, int i, const PayoffExpr& y, int j) {
  const auto& a = x.nodes[i];
  const auto& b = y.nodes[j];
  if (a.op != b.op) return false;
  switch (a.op) {
    case PayoffExpr::Op::literal:
      return a.value == b.value;
    case PayoffExpr::Op::variable:
      return a.t == b.t && a.n == b.n;
    case PayoffExpr::Op::fpowi:
      return a.exponent == b.exponent && node_equal(x, a.a, y, b.a);
    case PayoffExpr::Op::neg:
    case PayoffExpr::Op::fabs:
    case PayoffExpr::Op::fpos:
      return node_equal(x, a.a, y, b.a);
    default:
      return node_equal(x, a.a, y, b.a) && node_equal(x, a.b, y, b.b);
  }
}
}  // namespace

bool structurally_equal(const PayoffExpr& a, const PayoffExpr& b) {
  if (a.empty() || b.empty()) return a.empty() == b.empty();
  return node_equal(a, a.root, b, b.root);
}

}  // namespace superhedge
