/**
 * @file expr.hpp
 * @brief Expression AST, parser and canonical printer for complex scalar fields.
 *
 * Grammar (lowest to highest precedence):
 *
 *     expr    := term (('+' | '-') term)*
 *     term    := unary (('*' | '/') unary)*
 *     unary   := '-' unary | power
 *     power   := atom ('^' exponent)?
 *     exponent:= INTEGER | '(' INTEGER ')'
 *     atom    := NUMBER | 'i' | 'pi' | IDENT | FUNC '(' expr ')' | '(' expr ')'
 *
 * x, y, z and t are variables, sin/cos/exp/re/im are functions, every other
 * identifier is a named real parameter. Whitespace is insignificant and
 * juxtaposition is rejected.
 */
#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vortex_atlas/errors.hpp"

namespace vortex_atlas {

enum class NodeKind { Number, ImaginaryUnit, Parameter, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Function { Sin, Cos, Exp, Re, Im };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Number;
  double number = 0.0;
  std::string name;
  int exponent = 0;
  Function function = Function::Sin;
  std::vector<Expr> args;
};

inline const char* function_name(Function f) {
  switch (f) {
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Exp: return "exp";
    case Function::Re: return "re";
    case Function::Im: return "im";
  }
  return "?";
}

inline bool is_variable_name(std::string_view s) {
  return s == "x" || s == "y" || s == "z" || s == "t";
}

// ---------------------------------------------------------------------------
// builders

namespace expr {

inline Expr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

/// Literal; negative values become Neg(literal) so printing round-trips.
inline Expr number(double v) {
  if (v < 0 || (v == 0 && std::signbit(v))) {
    Node n{NodeKind::Number};
    n.number = -v;
    Node neg{NodeKind::Neg};
    neg.args = {make(std::move(n))};
    return make(std::move(neg));
  }
  Node n{NodeKind::Number};
  n.number = v;
  return make(std::move(n));
}
inline Expr imag_unit() { return make(Node{NodeKind::ImaginaryUnit}); }
inline Expr symbol(const std::string& name) {
  Node n{is_variable_name(name) ? NodeKind::Variable : NodeKind::Parameter};
  n.name = name;
  return make(std::move(n));
}
inline Expr unary(NodeKind kind, Expr a) {
  Node n{kind};
  n.args = {std::move(a)};
  return make(std::move(n));
}
inline Expr binary(NodeKind kind, Expr a, Expr b) {
  Node n{kind};
  n.args = {std::move(a), std::move(b)};
  return make(std::move(n));
}
inline Expr neg(Expr a) { return unary(NodeKind::Neg, std::move(a)); }
inline Expr add(Expr a, Expr b) { return binary(NodeKind::Add, std::move(a), std::move(b)); }
inline Expr sub(Expr a, Expr b) { return binary(NodeKind::Sub, std::move(a), std::move(b)); }
inline Expr mul(Expr a, Expr b) { return binary(NodeKind::Mul, std::move(a), std::move(b)); }
inline Expr div(Expr a, Expr b) { return binary(NodeKind::Div, std::move(a), std::move(b)); }
inline Expr pow(Expr a, int e) {
  Node n{NodeKind::Pow};
  n.exponent = e;
  n.args = {std::move(a)};
  return make(std::move(n));
}
inline Expr call(Function f, Expr a) {
  Node n{NodeKind::Call};
  n.function = f;
  n.args = {std::move(a)};
  return make(std::move(n));
}

}  // namespace expr

// ---------------------------------------------------------------------------
// parser

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) { advance(); }

  Expr parse() {
    Expr e = parse_expr();
    if (tok_.kind != Tok::End) fail({"+", "-", "*", "/", "^", "end of input"}, "unexpected token");
    return e;
  }

 private:
  enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
  struct Token {
    Tok kind = Tok::End;
    std::size_t offset = 0;
    std::string_view text;
    double value = 0.0;
    bool integral = false;
  };

  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& msg) const {
    throw SyntaxError(tok_.offset, std::move(expected), msg);
  }

  void advance() {
    std::size_t p = pos_;
    while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
    tok_ = Token{};
    tok_.offset = p;
    if (p >= text_.size()) {
      pos_ = p;
      return;
    }
    const char c = text_[p];
    auto single = [&](Tok k) {
      tok_.kind = k;
      tok_.text = text_.substr(p, 1);
      pos_ = p + 1;
    };
    switch (c) {
      case '+': return single(Tok::Plus);
      case '-': return single(Tok::Minus);
      case '*': return single(Tok::Star);
      case '/': return single(Tok::Slash);
      case '^': return single(Tok::Caret);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t q = p;
      bool integral = true;
      while (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) ++q;
      if (q < text_.size() && text_[q] == '.') {
        integral = false;
        ++q;
        while (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) ++q;
      }
      if (q < text_.size() && (text_[q] == 'e' || text_[q] == 'E')) {
        std::size_t r = q + 1;
        if (r < text_.size() && (text_[r] == '+' || text_[r] == '-')) ++r;
        if (r < text_.size() && std::isdigit(static_cast<unsigned char>(text_[r]))) {
          integral = false;
          q = r;
          while (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) ++q;
        }
      }
      tok_.kind = Tok::Number;
      tok_.text = text_.substr(p, q - p);
      tok_.integral = integral;
      const auto res = std::from_chars(text_.data() + p, text_.data() + q, tok_.value);
      if (res.ec != std::errc() || res.ptr != text_.data() + q)
        throw SyntaxError(p, {"number"}, "malformed number");
      pos_ = q;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t q = p;
      while (q < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[q])) || text_[q] == '_'))
        ++q;
      tok_.kind = Tok::Ident;
      tok_.text = text_.substr(p, q - p);
      pos_ = q;
      return;
    }
    throw SyntaxError(p, {"number", "identifier", "operator", "("},
                      std::string("unexpected character '") + c + "'");
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
      const NodeKind k = tok_.kind == Tok::Plus ? NodeKind::Add : NodeKind::Sub;
      advance();
      lhs = expr::binary(k, lhs, parse_term());
    }
    return lhs;
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
      const NodeKind k = tok_.kind == Tok::Star ? NodeKind::Mul : NodeKind::Div;
      advance();
      lhs = expr::binary(k, lhs, parse_unary());
    }
    return lhs;
  }

  Expr parse_unary() {
    if (tok_.kind == Tok::Minus) {
      advance();
      return expr::neg(parse_unary());
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (tok_.kind != Tok::Caret) return base;
    advance();
    bool paren = false;
    if (tok_.kind == Tok::LParen) {
      paren = true;
      advance();
    }
    if (tok_.kind == Tok::Minus) fail({"non-negative integer"}, "negative exponent");
    if (tok_.kind != Tok::Number || !tok_.integral || tok_.value > 64)
      fail({"non-negative integer"}, "exponent must be a non-negative integer literal");
    const int e = static_cast<int>(tok_.value);
    advance();
    if (paren) {
      if (tok_.kind != Tok::RParen) fail({")"}, "unclosed exponent");
      advance();
    }
    return expr::pow(base, e);
  }

  Expr parse_atom() {
    switch (tok_.kind) {
      case Tok::Number: {
        Node n{NodeKind::Number};
        n.number = tok_.value;
        advance();
        return expr::make(std::move(n));
      }
      case Tok::LParen: {
        advance();
        Expr e = parse_expr();
        if (tok_.kind != Tok::RParen) fail({")", "+", "-", "*", "/"}, "expected ')'");
        advance();
        return e;
      }
      case Tok::Ident: {
        const std::string name(tok_.text);
        const std::size_t at = tok_.offset;
        advance();
        static const std::map<std::string, Function> functions = {
            {"sin", Function::Sin}, {"cos", Function::Cos}, {"exp", Function::Exp},
            {"re", Function::Re},   {"im", Function::Im}};
        if (auto it = functions.find(name); it != functions.end()) {
          if (tok_.kind != Tok::LParen) fail({"("}, "function '" + name + "' needs an argument");
          advance();
          Expr arg = parse_expr();
          if (tok_.kind != Tok::RParen) fail({")"}, "expected ')' after function argument");
          advance();
          return expr::call(it->second, arg);
        }
        if (tok_.kind == Tok::LParen)
          throw SyntaxError(at, {"sin", "cos", "exp", "re", "im"}, "unknown function '" + name + "'");
        if (name == "i") return expr::imag_unit();
        if (name == "pi") {
          Node n{NodeKind::Number};
          n.number = std::numbers::pi;
          return expr::make(std::move(n));
        }
        return expr::symbol(name);
      }
      default:
        fail({"number", "identifier", "i", "(", "-"}, "expected an operand");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token tok_;
};

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // shortest representation that round-trips
  for (int prec = 1; prec <= 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

inline int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Neg: return 3;
    case NodeKind::Pow: return 4;
    default: return 5;
  }
}

inline void print(const Node& n, std::string& out);

inline void print_child(const Node& child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print(child, out);
    out += ')';
  } else {
    print(child, out);
  }
}

inline void print(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Number: {
      const std::string s = format_number(n.number);
      // an exponent-form literal is still a single token
      out += s;
      return;
    }
    case NodeKind::ImaginaryUnit: out += 'i'; return;
    case NodeKind::Parameter:
    case NodeKind::Variable: out += n.name; return;
    case NodeKind::Neg:
      out += '-';
      print_child(*n.args[0], 3, out);
      return;
    case NodeKind::Add:
    case NodeKind::Sub:
      print_child(*n.args[0], 1, out);
      out += n.kind == NodeKind::Add ? " + " : " - ";
      print_child(*n.args[1], 2, out);
      return;
    case NodeKind::Mul:
    case NodeKind::Div:
      print_child(*n.args[0], 2, out);
      out += n.kind == NodeKind::Mul ? "*" : "/";
      print_child(*n.args[1], 3, out);
      return;
    case NodeKind::Pow:
      print_child(*n.args[0], 5, out);
      out += '^';
      out += std::to_string(n.exponent);
      return;
    case NodeKind::Call:
      out += function_name(n.function);
      out += '(';
      print(*n.args[0], out);
      out += ')';
      return;
  }
}

}  // namespace detail

/// parse_field: text to AST. Throws SyntaxError with the byte offset.
inline Expr parse_field(std::string_view text) { return detail::Parser(text).parse(); }

/// Canonical printer; parse(to_string(e)) is structurally equal to e for
/// parsed expressions.
inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print(*e, out);
  return out;
}

inline bool structurally_equal(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
  switch (a->kind) {
    case NodeKind::Number:
      if (a->number != b->number) return false;
      break;
    case NodeKind::Parameter:
    case NodeKind::Variable:
      if (a->name != b->name) return false;
      break;
    case NodeKind::Pow:
      if (a->exponent != b->exponent) return false;
      break;
    case NodeKind::Call:
      if (a->function != b->function) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!structurally_equal(a->args[i], b->args[i])) return false;
  return true;
}

/// Replaces Variable/Parameter nodes by name.
inline Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
  if (e->kind == NodeKind::Variable || e->kind == NodeKind::Parameter) {
    auto it = bindings.find(e->name);
    return it == bindings.end() ? e : it->second;
  }
  if (e->args.empty()) return e;
  Node n = *e;
  bool changed = false;
  for (auto& a : n.args) {
    Expr s = substitute(a, bindings);
    changed |= (s != a);
    a = std::move(s);
  }
  return changed ? expr::make(std::move(n)) : e;
}

/// Names of every symbol of the given kind in the tree.
inline std::set<std::string> collect_symbols(const Expr& e, NodeKind kind) {
  std::set<std::string> out;
  std::vector<const Node*> stack{e.get()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (n->kind == kind) out.insert(n->name);
    for (const auto& a : n->args) stack.push_back(a.get());
  }
  return out;
}

}  // namespace vortex_atlas
