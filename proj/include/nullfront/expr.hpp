#pragma once

// Arithmetic expression DSL used for metric coefficients, graph slices and
// explicit Legendrian data. Grammar (EBNF) is documented in docs/grammar.md.
//
// Evaluation is plain IEEE double arithmetic with left-to-right operand
// order, so results are bit-reproducible across runs on one platform.

#include "nullfront/core.hpp"

#include <cctype>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace nullfront {

struct ParseError : Error {
  std::size_t offset;
  ParseError(std::size_t off, const std::string& msg)
      : Error("parse error at offset " + std::to_string(off) + ": " + msg),
        offset(off) {}
};

struct EvalError : Error {
  using Error::Error;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Lit, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

  Kind kind;
  double value = 0.0;   // Lit
  std::string name;     // Var, Call
  ExprPtr a, b;

  static ExprPtr lit(double v) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Lit;
    e->value = v;
    return e;
  }
  static ExprPtr var(std::string n) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Var;
    e->name = std::move(n);
    return e;
  }
  static ExprPtr unary(Kind k, ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->a = std::move(a);
    return e;
  }
  static ExprPtr binary(Kind k, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
  }
  static ExprPtr call(std::string fn, ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Call;
    e->name = std::move(fn);
    e->a = std::move(a);
    return e;
  }
};

using Env = std::map<std::string, double>;

inline const std::set<std::string>& builtin_functions() {
  static const std::set<std::string> fns = {"sin", "cos", "exp", "sqrt", "tanh"};
  return fns;
}

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, const std::set<std::string>* allowed)
      : text_(text), allowed_(allowed) {}

  ExprPtr parse() {
    if (text_.empty()) throw ParseError(0, "empty expression");
    skip_ws();
    ExprPtr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError(pos_, "unexpected trailing input");
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  const std::set<std::string>* allowed_;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  ExprPtr parse_sum() {
    ExprPtr e = parse_term();
    for (;;) {
      if (eat('+'))
        e = Expr::binary(Expr::Kind::Add, e, parse_term());
      else if (eat('-'))
        e = Expr::binary(Expr::Kind::Sub, e, parse_term());
      else
        return e;
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_factor();
    for (;;) {
      if (eat('*'))
        e = Expr::binary(Expr::Kind::Mul, e, parse_factor());
      else if (eat('/'))
        e = Expr::binary(Expr::Kind::Div, e, parse_factor());
      else
        return e;
    }
  }

  // unary minus binds looser than '^': -x^2 parses as -(x^2)
  ExprPtr parse_factor() {
    if (eat('-')) return Expr::unary(Expr::Kind::Neg, parse_factor());
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (eat('^')) {
      ExprPtr expnt = parse_exponent();
      return Expr::binary(Expr::Kind::Pow, base, expnt);
    }
    return base;
  }

  // '^' demands a constant right operand (optionally negated literal)
  ExprPtr parse_exponent() {
    skip_ws();
    std::size_t at = pos_;
    bool neg = eat('-');
    skip_ws();
    if (pos_ >= text_.size() || !(std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      throw ParseError(at, "exponent must be a numeric literal");
    ExprPtr lit = parse_number();
    if (peek() == '^')
      throw ParseError(pos_, "chained '^' is not allowed; exponent must be a literal");
    return neg ? Expr::unary(Expr::Kind::Neg, lit) : lit;
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(pos_, "expected operand");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_sum();
      if (!eat(')')) throw ParseError(pos_, "expected ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    throw ParseError(pos_, "expected operand");
  }

  ExprPtr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' belongs to an identifier context, not this number
      }
    }
    std::string tok(text_.substr(start, pos_ - start));
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return Expr::lit(v);
    } catch (const std::exception&) {
      throw ParseError(start, "malformed number '" + tok + "'");
    }
  }

  ExprPtr parse_ident() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (builtin_functions().count(name)) {
      if (!eat('(')) throw ParseError(pos_, "expected '(' after function '" + name + "'");
      ExprPtr arg = parse_sum();
      if (!eat(')')) throw ParseError(pos_, "expected ')'");
      return Expr::call(name, arg);
    }
    if (peek() == '(')
      throw ParseError(start, "unknown function '" + name + "'");
    if (allowed_ && !allowed_->count(name))
      throw ParseError(start, "unknown identifier '" + name + "'");
    return Expr::var(name);
  }
};

}  // namespace detail

inline ExprPtr parse_expr(std::string_view text,
                          const std::set<std::string>* allowed = nullptr) {
  return detail::Parser(text, allowed).parse();
}

inline double eval_expr(const ExprPtr& e, const Env& env) {
  using K = Expr::Kind;
  switch (e->kind) {
    case K::Lit:
      return e->value;
    case K::Var: {
      auto it = env.find(e->name);
      if (it == env.end()) throw EvalError("unbound identifier '" + e->name + "'");
      return it->second;
    }
    case K::Neg:
      return -eval_expr(e->a, env);
    case K::Add: {
      double l = eval_expr(e->a, env);
      double r = eval_expr(e->b, env);
      return l + r;
    }
    case K::Sub: {
      double l = eval_expr(e->a, env);
      double r = eval_expr(e->b, env);
      return l - r;
    }
    case K::Mul: {
      double l = eval_expr(e->a, env);
      double r = eval_expr(e->b, env);
      return l * r;
    }
    case K::Div: {
      double l = eval_expr(e->a, env);
      double r = eval_expr(e->b, env);
      if (r == 0.0) throw EvalError("division by zero");
      return l / r;
    }
    case K::Pow: {
      double l = eval_expr(e->a, env);
      double r = eval_expr(e->b, env);
      double v = std::pow(l, r);
      if (!std::isfinite(v))
        throw EvalError("domain error in '^' (base " + std::to_string(l) +
                        ", exponent " + std::to_string(r) + ")");
      return v;
    }
    case K::Call: {
      double x = eval_expr(e->a, env);
      if (e->name == "sin") return std::sin(x);
      if (e->name == "cos") return std::cos(x);
      if (e->name == "exp") return std::exp(x);
      if (e->name == "tanh") return std::tanh(x);
      if (e->name == "sqrt") {
        if (x < 0.0) throw EvalError("sqrt of negative value");
        return std::sqrt(x);
      }
      throw EvalError("unknown function '" + e->name + "'");
    }
  }
  throw EvalError("corrupt expression node");
}

// Canonical printer; parse(print(parse(s))) reproduces the same tree.
inline std::string print_expr(const ExprPtr& e) {
  using K = Expr::Kind;
  auto prec = [](K k) {
    switch (k) {
      case K::Add:
      case K::Sub: return 1;
      case K::Mul:
      case K::Div: return 2;
      case K::Neg: return 3;
      case K::Pow: return 4;
      default: return 5;
    }
  };
  std::function<std::string(const ExprPtr&)> go = [&](const ExprPtr& n) -> std::string {
    auto wrap = [&](const ExprPtr& child, int minp) {
      std::string s = go(child);
      if (prec(child->kind) < minp) return "(" + s + ")";
      return s;
    };
    switch (n->kind) {
      case K::Lit: {
        char buf[32];
        auto r = std::snprintf(buf, sizeof buf, "%.17g", n->value);
        return std::string(buf, buf + r);
      }
      case K::Var: return n->name;
      case K::Neg: return "-" + wrap(n->a, prec(K::Neg));
      case K::Add: return wrap(n->a, 1) + " + " + wrap(n->b, 2);
      case K::Sub: return wrap(n->a, 1) + " - " + wrap(n->b, 2);
      case K::Mul: return wrap(n->a, 2) + "*" + wrap(n->b, 3);
      case K::Div: return wrap(n->a, 2) + "/" + wrap(n->b, 3);
      case K::Pow: return wrap(n->a, 5) + "^" + go(n->b);
      case K::Call: return n->name + "(" + go(n->a) + ")";
    }
    return "";
  };
  return go(e);
}

inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Lit: return a->value == b->value;
    case Expr::Kind::Var: return a->name == b->name;
    case Expr::Kind::Neg: return expr_equal(a->a, b->a);
    case Expr::Kind::Call: return a->name == b->name && expr_equal(a->a, b->a);
    default: return expr_equal(a->a, b->a) && expr_equal(a->b, b->b);
  }
}

}  // namespace nullfront
