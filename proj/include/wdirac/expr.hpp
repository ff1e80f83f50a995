#pragma once

// Coefficient expression grammar:
//   expr   := ('-')? term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' atom)?
//   atom   := number | 'x' | 'pi' | func '(' expr ')' | '(' expr ')'
//   func   := sin | cos | exp | log | sqrt | abs | tanh
// The leading unary minus is an extension over the documented core grammar.
// Domain violations (log of a nonpositive argument, ...) surface at
// evaluation time with the offending x attached.

#include <cctype>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wdirac/common.hpp"

namespace wdirac {

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t pos,
             std::vector<std::string> expected)
      : Error(what + " at position " + std::to_string(pos)),
        pos_(pos),
        expected_(std::move(expected)) {}
  std::size_t position() const { return pos_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t pos_;
  std::vector<std::string> expected_;
};

enum class ExprOp {
  kNumber,
  kVar,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kPow,
  kNeg,
  kSin,
  kCos,
  kExp,
  kLog,
  kSqrt,
  kAbs,
  kTanh,
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprOp op;
  double number = 0.0;
  ExprPtr lhs, rhs;
};

inline ExprPtr make_number(double v) {
  return std::make_shared<ExprNode>(ExprNode{ExprOp::kNumber, v, nullptr, nullptr});
}
inline ExprPtr make_node(ExprOp op, ExprPtr l, ExprPtr r = nullptr) {
  return std::make_shared<ExprNode>(ExprNode{op, 0.0, std::move(l), std::move(r)});
}

inline double expr_eval(const ExprNode& n, double x) {
  switch (n.op) {
    case ExprOp::kNumber:
      return n.number;
    case ExprOp::kVar:
      return x;
    case ExprOp::kAdd:
      return expr_eval(*n.lhs, x) + expr_eval(*n.rhs, x);
    case ExprOp::kSub:
      return expr_eval(*n.lhs, x) - expr_eval(*n.rhs, x);
    case ExprOp::kMul:
      return expr_eval(*n.lhs, x) * expr_eval(*n.rhs, x);
    case ExprOp::kDiv: {
      double d = expr_eval(*n.rhs, x);
      if (d == 0.0) throw EvalDomainError("division by zero", x);
      return expr_eval(*n.lhs, x) / d;
    }
    case ExprOp::kPow: {
      double b = expr_eval(*n.lhs, x), e = expr_eval(*n.rhs, x);
      double r = std::pow(b, e);
      if (!std::isfinite(r))
        throw EvalDomainError("power out of domain", x);
      return r;
    }
    case ExprOp::kNeg:
      return -expr_eval(*n.lhs, x);
    case ExprOp::kSin:
      return std::sin(expr_eval(*n.lhs, x));
    case ExprOp::kCos:
      return std::cos(expr_eval(*n.lhs, x));
    case ExprOp::kExp: {
      double r = std::exp(expr_eval(*n.lhs, x));
      if (!std::isfinite(r)) throw EvalDomainError("exp overflow", x);
      return r;
    }
    case ExprOp::kLog: {
      double a = expr_eval(*n.lhs, x);
      if (a <= 0.0) throw EvalDomainError("log of nonpositive argument", x);
      return std::log(a);
    }
    case ExprOp::kSqrt: {
      double a = expr_eval(*n.lhs, x);
      if (a < 0.0) throw EvalDomainError("sqrt of negative argument", x);
      return std::sqrt(a);
    }
    case ExprOp::kAbs:
      return std::abs(expr_eval(*n.lhs, x));
    case ExprOp::kTanh:
      return std::tanh(expr_eval(*n.lhs, x));
  }
  throw Error("expr_eval: corrupt node");
}

namespace detail {

struct Lexer {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool accept(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    return std::string(text.substr(start, pos - start));
  }
  double number() {
    skip_ws();
    std::size_t consumed = 0;
    double v;
    try {
      v = std::stod(std::string(text.substr(pos)), &consumed);
    } catch (...) {
      throw ParseError("malformed number", pos, {"number"});
    }
    pos += consumed;
    return v;
  }
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_{text} {}

  ExprPtr parse() {
    ExprPtr e = expr();
    if (!lex_.eof())
      throw ParseError("unexpected trailing input", lex_.pos,
                       {"+", "-", "*", "/", "end of input"});
    return e;
  }

 private:
  Lexer lex_;

  ExprPtr expr() {
    ExprPtr e;
    if (lex_.accept('-'))
      e = fold(make_node(ExprOp::kNeg, term()));
    else
      e = term();
    for (;;) {
      if (lex_.accept('+'))
        e = fold(make_node(ExprOp::kAdd, e, term()));
      else if (lex_.accept('-'))
        e = fold(make_node(ExprOp::kSub, e, term()));
      else
        return e;
    }
  }

  ExprPtr term() {
    ExprPtr e = factor();
    for (;;) {
      if (lex_.accept('*'))
        e = fold(make_node(ExprOp::kMul, e, factor()));
      else if (lex_.accept('/'))
        e = fold(make_node(ExprOp::kDiv, e, factor()));
      else
        return e;
    }
  }

  ExprPtr factor() {
    ExprPtr base = atom();
    if (lex_.accept('^')) return fold(make_node(ExprOp::kPow, base, atom()));
    return base;
  }

  ExprPtr atom() {
    char c = lex_.peek();
    if (c == '(') {
      lex_.accept('(');
      ExprPtr e = expr();
      if (!lex_.accept(')'))
        throw ParseError("missing closing parenthesis", lex_.pos, {")"});
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return make_number(lex_.number());
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t at = lex_.pos;
      std::string id = lex_.ident();
      if (id == "x")
        return make_node(ExprOp::kVar, nullptr);
      if (id == "pi") return make_number(kPi);
      ExprOp fn;
      if (id == "sin")
        fn = ExprOp::kSin;
      else if (id == "cos")
        fn = ExprOp::kCos;
      else if (id == "exp")
        fn = ExprOp::kExp;
      else if (id == "log")
        fn = ExprOp::kLog;
      else if (id == "sqrt")
        fn = ExprOp::kSqrt;
      else if (id == "abs")
        fn = ExprOp::kAbs;
      else if (id == "tanh")
        fn = ExprOp::kTanh;
      else
        throw ParseError("unknown identifier '" + id + "'", at,
                         {"x", "pi", "sin", "cos", "exp", "log", "sqrt", "abs",
                          "tanh"});
      if (!lex_.accept('('))
        throw ParseError("expected '(' after function name", lex_.pos, {"("});
      ExprPtr arg = expr();
      if (!lex_.accept(')'))
        throw ParseError("missing closing parenthesis", lex_.pos, {")"});
      return make_node(fn, arg);
    }
    throw ParseError("expected an operand", lex_.pos,
                     {"number", "x", "pi", "function", "("});
  }

  // Constant folding; evaluation-domain failures are left unfolded so they
  // surface at evaluation time.
  static ExprPtr fold(ExprPtr n) {
    bool l_const = !n->lhs || n->lhs->op == ExprOp::kNumber;
    bool r_const = !n->rhs || n->rhs->op == ExprOp::kNumber;
    if (l_const && r_const && n->op != ExprOp::kNumber && n->op != ExprOp::kVar) {
      try {
        return make_number(expr_eval(*n, 0.0));
      } catch (const EvalDomainError&) {
        return n;
      }
    }
    return n;
  }
};

}  // namespace detail

inline ExprPtr parse_expression(std::string_view text) {
  return detail::Parser(text).parse();
}

// Fully parenthesized rendering; parses back to an equivalent expression.
inline std::string expr_to_string(const ExprNode& n) {
  auto bin = [&](const char* op) {
    return "(" + expr_to_string(*n.lhs) + op + expr_to_string(*n.rhs) + ")";
  };
  auto fn = [&](const char* name) {
    return std::string(name) + "(" + expr_to_string(*n.lhs) + ")";
  };
  switch (n.op) {
    case ExprOp::kNumber: {
      std::ostringstream os;
      os.precision(17);
      if (n.number < 0)
        os << "(0-" << -n.number << ")";
      else
        os << n.number;
      return os.str();
    }
    case ExprOp::kVar:
      return "x";
    case ExprOp::kAdd:
      return bin("+");
    case ExprOp::kSub:
      return bin("-");
    case ExprOp::kMul:
      return bin("*");
    case ExprOp::kDiv:
      return bin("/");
    case ExprOp::kPow:
      return "(" + expr_to_string(*n.lhs) + ")^(" + expr_to_string(*n.rhs) + ")";
    case ExprOp::kNeg:
      return "(0-" + expr_to_string(*n.lhs) + ")";
    case ExprOp::kSin:
      return fn("sin");
    case ExprOp::kCos:
      return fn("cos");
    case ExprOp::kExp:
      return fn("exp");
    case ExprOp::kLog:
      return fn("log");
    case ExprOp::kSqrt:
      return fn("sqrt");
    case ExprOp::kAbs:
      return fn("abs");
    case ExprOp::kTanh:
      return fn("tanh");
  }
  throw Error("expr_to_string: corrupt node");
}

// Symbolic x-derivative. abs' uses the sign away from zero.
inline ExprPtr expr_derivative(const ExprPtr& n) {
  using E = ExprOp;
  auto num = make_number(0.0);
  switch (n->op) {
    case E::kNumber:
      return make_number(0.0);
    case E::kVar:
      return make_number(1.0);
    case E::kAdd:
      return make_node(E::kAdd, expr_derivative(n->lhs), expr_derivative(n->rhs));
    case E::kSub:
      return make_node(E::kSub, expr_derivative(n->lhs), expr_derivative(n->rhs));
    case E::kMul:
      return make_node(
          E::kAdd, make_node(E::kMul, expr_derivative(n->lhs), n->rhs),
          make_node(E::kMul, n->lhs, expr_derivative(n->rhs)));
    case E::kDiv:
      // (u/v)' = u'/v - u v'/v^2
      return make_node(
          E::kSub, make_node(E::kDiv, expr_derivative(n->lhs), n->rhs),
          make_node(E::kDiv, make_node(E::kMul, n->lhs, expr_derivative(n->rhs)),
                    make_node(E::kMul, n->rhs, n->rhs)));
    case E::kPow:
      // (u^v)' = u^v * (v' log u + v u'/u)
      return make_node(
          E::kMul, n,
          make_node(E::kAdd,
                    make_node(E::kMul, expr_derivative(n->rhs),
                              make_node(E::kLog, n->lhs)),
                    make_node(E::kDiv,
                              make_node(E::kMul, n->rhs, expr_derivative(n->lhs)),
                              n->lhs)));
    case E::kNeg:
      return make_node(E::kNeg, expr_derivative(n->lhs));
    case E::kSin:
      return make_node(E::kMul, make_node(E::kCos, n->lhs),
                       expr_derivative(n->lhs));
    case E::kCos:
      return make_node(E::kNeg, make_node(E::kMul, make_node(E::kSin, n->lhs),
                                          expr_derivative(n->lhs)));
    case E::kExp:
      return make_node(E::kMul, n, expr_derivative(n->lhs));
    case E::kLog:
      return make_node(E::kDiv, expr_derivative(n->lhs), n->lhs);
    case E::kSqrt:
      return make_node(E::kDiv, expr_derivative(n->lhs),
                       make_node(E::kMul, make_number(2.0), n));
    case E::kAbs:
      // d|u|/dx = u/|u| * u'
      return make_node(E::kMul, make_node(E::kDiv, n->lhs, n),
                       expr_derivative(n->lhs));
    case E::kTanh:
      // 1 - tanh^2
      return make_node(E::kMul,
                       make_node(E::kSub, make_number(1.0),
                                 make_node(E::kMul, n, n)),
                       expr_derivative(n->lhs));
  }
  (void)num;
  throw Error("expr_derivative: corrupt node");
}

}  // namespace wdirac
