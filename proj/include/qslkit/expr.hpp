// Copyright 2026 The qslkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file expr.hpp
 * @brief A small operator-expression language for writing Hamiltonians and
 * channels in model files.
 *
 * Grammar (precedence low to high):
 *
 *   expr    := term (('+' | '-') term)*
 *   term    := factor ('*' factor)*
 *   factor  := ['-'] primary
 *   primary := number | atom | '(' expr ')' | 'dag(' expr ')'
 *            | 'kron(' expr ',' expr ')' | 'sqrt(' expr ')'
 *   number  := decimal literal with an optional trailing 'i'
 *
 * Atoms: i, sx, sy, sz, sp, sm, id(d), gm(k), proj(i,j,d), coll_sm(N),
 * coll_sz(N). Scalars multiply matrices; a scalar added to a matrix stands for
 * that multiple of the identity. sqrt() takes scalars only. There is no
 * implicit multiplication.
 */
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qslkit/errors.hpp"
#include "qslkit/operators.hpp"

namespace qslkit::expr {

enum class NodeKind { Number, Atom, Neg, Dag, Sqrt, Add, Sub, Mul, Kron };

struct Node {
  NodeKind kind = NodeKind::Number;
  double number = 0.0;
  bool imaginary = false;
  std::string name;
  std::vector<long> args;
  std::unique_ptr<Node> lhs;
  std::unique_ptr<Node> rhs;
  std::size_t begin = 0;
  std::size_t end = 0;
  /// Longest path to a leaf, bounded so evaluation recursion stays shallow.
  int height = 1;
};

using Value = std::variant<cplx, ComplexMatrix>;

namespace detail {

enum class Tok { Number, Ident, Plus, Minus, Star, LParen, RParen, Comma, End };

struct Token {
  Token(Tok k, std::size_t b, std::size_t e) : kind(k), begin(b), end(e) {}
  Tok kind;
  std::size_t begin;
  std::size_t end;
  double number = 0.0;
  bool imaginary = false;
  std::string text;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
inline bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t p = 0;
  while (p < src.size()) {
    const char c = src[p];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++p;
      continue;
    }
    const std::size_t start = p;
    if (digit(c) || (c == '.' && p + 1 < src.size() && digit(src[p + 1]))) {
      while (p < src.size() && digit(src[p])) ++p;
      if (p < src.size() && src[p] == '.') {
        ++p;
        while (p < src.size() && digit(src[p])) ++p;
      }
      if (p < src.size() && (src[p] == 'e' || src[p] == 'E')) {
        std::size_t q = p + 1;
        if (q < src.size() && (src[q] == '+' || src[q] == '-')) ++q;
        if (q < src.size() && digit(src[q])) {
          p = q;
          while (p < src.size() && digit(src[p])) ++p;
        }
      }
      Token t{Tok::Number, start, p};
      const std::string lit(src.substr(start, p - start));
      t.number = std::strtod(lit.c_str(), nullptr);
      if (!std::isfinite(t.number)) throw ParseError("numeric literal out of range", start, p);
      if (p < src.size() && src[p] == 'i' && (p + 1 >= src.size() || !ident_char(src[p + 1]))) {
        t.imaginary = true;
        ++p;
        t.end = p;
      }
      if (p < src.size() && ident_char(src[p])) {
        throw ParseError("malformed number (no implicit multiplication)", start, p + 1);
      }
      out.push_back(std::move(t));
      continue;
    }
    if (ident_start(c)) {
      while (p < src.size() && ident_char(src[p])) ++p;
      Token t{Tok::Ident, start, p};
      t.text = std::string(src.substr(start, p - start));
      out.push_back(std::move(t));
      continue;
    }
    Tok k;
    switch (c) {
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case ',': k = Tok::Comma; break;
      default: throw ParseError(std::string("unexpected character '") + c + "'", start, start + 1);
    }
    out.push_back(Token{k, start, start + 1});
    ++p;
  }
  out.push_back(Token{Tok::End, src.size(), src.size()});
  return out;
}

struct AtomSpec {
  const char* name;
  int arity;
};

inline constexpr AtomSpec kAtoms[] = {{"i", 0},  {"sx", 0}, {"sy", 0},   {"sz", 0},      {"sp", 0},     {"sm", 0},
                                      {"id", 1}, {"gm", 1}, {"proj", 3}, {"coll_sm", 1}, {"coll_sz", 1}};

inline const AtomSpec* find_atom(const std::string& name) {
  for (const auto& a : kAtoms) {
    if (name == a.name) return &a;
  }
  return nullptr;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : tokens_(tokenize(src)) {}

  std::unique_ptr<Node> parse() {
    auto node = expr();
    if (peek().kind != Tok::End) throw error("unexpected token");
    return node;
  }

 private:
  static constexpr int kMaxDepth = 256;
  static constexpr int kMaxHeight = 2048;

  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  ParseError error(const std::string& what) const {
    const Token& t = peek();
    return ParseError(what + (t.kind == Tok::End ? " (end of input)" : ""), t.begin, std::max(t.end, t.begin + 1));
  }

  void expect(Tok k, const char* what) {
    if (peek().kind != k) throw error(std::string("expected ") + what);
    ++pos_;
  }

  std::unique_ptr<Node> checked(std::unique_ptr<Node> n) const {
    n->height = 1 + std::max(n->lhs ? n->lhs->height : 0, n->rhs ? n->rhs->height : 0);
    if (n->height > kMaxHeight) throw error("expression too long");
    return n;
  }

  std::unique_ptr<Node> binary(NodeKind kind, std::unique_ptr<Node> l, std::unique_ptr<Node> r) const {
    auto n = std::make_unique<Node>();
    n->kind = kind;
    n->begin = l->begin;
    n->end = r->end;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return checked(std::move(n));
  }

  std::unique_ptr<Node> expr() {
    if (++depth_ > kMaxDepth) throw error("expression nested too deeply");
    auto node = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const NodeKind k = next().kind == Tok::Plus ? NodeKind::Add : NodeKind::Sub;
      node = binary(k, std::move(node), term());
    }
    --depth_;
    return node;
  }

  std::unique_ptr<Node> term() {
    auto node = factor();
    while (peek().kind == Tok::Star) {
      next();
      node = binary(NodeKind::Mul, std::move(node), factor());
    }
    return node;
  }

  std::unique_ptr<Node> factor() {
    if (peek().kind == Tok::Minus) {
      const std::size_t begin = next().begin;
      auto n = std::make_unique<Node>();
      n->kind = NodeKind::Neg;
      n->lhs = primary();
      n->begin = begin;
      n->end = n->lhs->end;
      return checked(std::move(n));
    }
    return primary();
  }

  long integer_arg() {
    const Token& t = peek();
    if (t.kind != Tok::Number || t.imaginary || t.number != std::floor(t.number) || t.number < 0.0 ||
        t.number > 1e9) {
      throw error("expected a nonnegative integer argument");
    }
    ++pos_;
    return static_cast<long>(t.number);
  }

  std::unique_ptr<Node> primary() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      next();
      auto n = std::make_unique<Node>();
      n->kind = NodeKind::Number;
      n->number = t.number;
      n->imaginary = t.imaginary;
      n->begin = t.begin;
      n->end = t.end;
      return n;
    }
    if (t.kind == Tok::LParen) {
      next();
      auto inner = expr();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (t.kind != Tok::Ident) throw error("expected a number, operator name or '('");

    const Token ident = next();
    const std::string& name = ident.text;
    if (name == "dag" || name == "sqrt" || name == "kron") {
      expect(Tok::LParen, "'(' after function name");
      auto n = std::make_unique<Node>();
      n->begin = ident.begin;
      n->lhs = expr();
      if (name == "kron") {
        n->kind = NodeKind::Kron;
        expect(Tok::Comma, "',' in kron(a, b)");
        n->rhs = expr();
      } else {
        n->kind = name == "dag" ? NodeKind::Dag : NodeKind::Sqrt;
      }
      n->end = peek().end;
      expect(Tok::RParen, "')'");
      return checked(std::move(n));
    }
    const AtomSpec* spec = find_atom(name);
    if (spec == nullptr) throw ParseError("unknown operator '" + name + "'", ident.begin, ident.end);
    auto n = std::make_unique<Node>();
    n->kind = NodeKind::Atom;
    n->name = name;
    n->begin = ident.begin;
    n->end = ident.end;
    if (spec->arity > 0) {
      expect(Tok::LParen, "'(' with operator arguments");
      for (int a = 0; a < spec->arity; ++a) {
        if (a > 0) expect(Tok::Comma, "','");
        n->args.push_back(integer_arg());
      }
      n->end = peek().end;
      expect(Tok::RParen, "')'");
    }
    return n;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

inline ParseError node_error(const Node& n, const std::string& what) {
  return ParseError(what, n.begin, std::max(n.end, n.begin + 1));
}

inline ComplexMatrix as_matrix(const Value& v) {
  if (const auto* m = std::get_if<ComplexMatrix>(&v)) return *m;
  ComplexMatrix one(1, 1);
  one(0, 0) = std::get<cplx>(v);
  return one;
}

inline ComplexMatrix atom_matrix(const Node& n) {
  const std::string& s = n.name;
  const auto& a = n.args;
  if (s == "sx") return pauli(PauliAxis::X);
  if (s == "sy") return pauli(PauliAxis::Y);
  if (s == "sz") return pauli(PauliAxis::Z);
  if (s == "sp") return ladder(LadderKind::Plus);
  if (s == "sm") return ladder(LadderKind::Minus);
  if (s == "id") return identity(a[0]);
  if (s == "gm") return gell_mann(static_cast<int>(a[0]));
  if (s == "proj") return projector(a[0], a[1], a[2]);
  if (s == "coll_sm") return collective_lowering(static_cast<int>(std::min<long>(a[0], 1000)));
  if (s == "coll_sz") return collective_dephasing(static_cast<int>(std::min<long>(a[0], 1000)));
  throw node_error(n, "unknown operator '" + s + "'");
}

inline Value eval_node(const Node& n) {
  switch (n.kind) {
    case NodeKind::Number:
      return n.imaginary ? cplx(0.0, n.number) : cplx(n.number, 0.0);
    case NodeKind::Atom:
      if (n.name == "i") return kI;
      try {
        return atom_matrix(n);
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw node_error(n, e.what());
      }
    case NodeKind::Neg: {
      Value v = eval_node(*n.lhs);
      if (auto* c = std::get_if<cplx>(&v)) return -*c;
      return ComplexMatrix(-std::get<ComplexMatrix>(v));
    }
    case NodeKind::Dag: {
      Value v = eval_node(*n.lhs);
      if (auto* c = std::get_if<cplx>(&v)) return std::conj(*c);
      return ComplexMatrix(std::get<ComplexMatrix>(v).adjoint());
    }
    case NodeKind::Sqrt: {
      Value v = eval_node(*n.lhs);
      if (auto* c = std::get_if<cplx>(&v)) return std::sqrt(*c);
      throw node_error(n, "sqrt() takes a scalar argument");
    }
    case NodeKind::Add:
    case NodeKind::Sub: {
      Value l = eval_node(*n.lhs);
      Value r = eval_node(*n.rhs);
      const double sign = n.kind == NodeKind::Add ? 1.0 : -1.0;
      auto* lc = std::get_if<cplx>(&l);
      auto* rc = std::get_if<cplx>(&r);
      if (lc && rc) return *lc + sign * *rc;
      if (lc || rc) {
        const ComplexMatrix& m = std::get<ComplexMatrix>(lc ? r : l);
        if (m.rows() != m.cols()) throw node_error(n, "scalar added to a non-square matrix");
        const ComplexMatrix s = (lc ? *lc : *rc) * ComplexMatrix::Identity(m.rows(), m.cols());
        return lc ? ComplexMatrix(s + sign * m) : ComplexMatrix(m + sign * s);
      }
      const auto& lm = std::get<ComplexMatrix>(l);
      const auto& rm = std::get<ComplexMatrix>(r);
      if (lm.rows() != rm.rows() || lm.cols() != rm.cols()) {
        throw node_error(n, "dimension mismatch: " + std::to_string(lm.rows()) + "x" + std::to_string(lm.cols()) +
                                (n.kind == NodeKind::Add ? " + " : " - ") + std::to_string(rm.rows()) + "x" +
                                std::to_string(rm.cols()));
      }
      return ComplexMatrix(lm + sign * rm);
    }
    case NodeKind::Mul: {
      Value l = eval_node(*n.lhs);
      Value r = eval_node(*n.rhs);
      auto* lc = std::get_if<cplx>(&l);
      auto* rc = std::get_if<cplx>(&r);
      if (lc && rc) return *lc * *rc;
      if (lc) return ComplexMatrix(*lc * std::get<ComplexMatrix>(r));
      if (rc) return ComplexMatrix(std::get<ComplexMatrix>(l) * *rc);
      const auto& lm = std::get<ComplexMatrix>(l);
      const auto& rm = std::get<ComplexMatrix>(r);
      if (lm.cols() != rm.rows()) {
        throw node_error(n, "dimension mismatch: " + std::to_string(lm.rows()) + "x" + std::to_string(lm.cols()) +
                                " * " + std::to_string(rm.rows()) + "x" + std::to_string(rm.cols()));
      }
      return ComplexMatrix(lm * rm);
    }
    case NodeKind::Kron: {
      Value l = eval_node(*n.lhs);
      Value r = eval_node(*n.rhs);
      try {
        return tensor(as_matrix(l), as_matrix(r));
      } catch (const Error& e) {
        throw node_error(n, e.what());
      }
    }
  }
  throw node_error(n, "unsupported expression");
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Number:
      out += format_number(n.number);
      if (n.imaginary) out += 'i';
      return;
    case NodeKind::Atom:
      out += n.name;
      if (!n.args.empty()) {
        out += '(';
        for (std::size_t k = 0; k < n.args.size(); ++k) {
          if (k) out += ", ";
          out += std::to_string(n.args[k]);
        }
        out += ')';
      }
      return;
    case NodeKind::Neg:
      out += "-(";
      print_node(*n.lhs, out);
      out += ')';
      return;
    case NodeKind::Dag:
    case NodeKind::Sqrt:
      out += n.kind == NodeKind::Dag ? "dag(" : "sqrt(";
      print_node(*n.lhs, out);
      out += ')';
      return;
    case NodeKind::Kron:
      out += "kron(";
      print_node(*n.lhs, out);
      out += ", ";
      print_node(*n.rhs, out);
      out += ')';
      return;
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
      out += '(';
      print_node(*n.lhs, out);
      out += n.kind == NodeKind::Add ? " + " : n.kind == NodeKind::Sub ? " - " : " * ";
      print_node(*n.rhs, out);
      out += ')';
      return;
  }
}

}  // namespace detail

/// Parses text into an expression tree; throws ParseError with the source span.
inline std::unique_ptr<Node> parse(std::string_view text) {
  return detail::Parser(text).parse();
}

/// Canonical, fully parenthesized text that reparses to an equal value.
inline std::string to_string(const Node& node) {
  std::string out;
  detail::print_node(node, out);
  return out;
}

inline Value evaluate(const Node& node) {
  return detail::eval_node(node);
}

}  // namespace qslkit::expr

namespace qslkit {

/// Evaluates an operator expression to a dim x dim matrix. A scalar result
/// becomes that multiple of the identity.
inline ComplexMatrix parse_operator(std::string_view text, Eigen::Index dim) {
  detail::require_dimension(dim, "parse_operator");
  const auto ast = expr::parse(text);
  expr::Value v = expr::evaluate(*ast);
  if (const auto* c = std::get_if<cplx>(&v)) return *c * ComplexMatrix::Identity(dim, dim);
  ComplexMatrix m = std::get<ComplexMatrix>(std::move(v));
  if (m.rows() != dim || m.cols() != dim) {
    throw ParseError("expression is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         ", expected dimension " + std::to_string(dim),
                     ast->begin, std::max(ast->end, ast->begin + 1));
  }
  return m;
}

/// Evaluates an expression that must reduce to a complex scalar (e.g. "sqrt(3)*0.5").
inline cplx parse_scalar(std::string_view text) {
  const auto ast = expr::parse(text);
  expr::Value v = expr::evaluate(*ast);
  if (const auto* c = std::get_if<cplx>(&v)) return *c;
  throw ParseError("expected a scalar expression", ast->begin, std::max(ast->end, ast->begin + 1));
}

}  // namespace qslkit
