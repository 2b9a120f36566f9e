// SPDX-License-Identifier: Apache-2.0
#include "qsc/lexer.hpp"

#include <cctype>

namespace qsc {

Lexer::Lexer(std::string_view text) {
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (text[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
        ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && text[j] == '.' && j + 1 < text.size() &&
          std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      t.kind = Token::Kind::Number;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else {
      static const char* two[] = {"->", "<=", ">=", "!=", "==", "&&", "||", ".."};
      t.kind = Token::Kind::Punct;
      t.text = std::string(1, c);
      for (auto* p : two) {
        if (text.substr(i, 2) == p) {
          t.text = p;
          break;
        }
      }
      advance(t.text.size());
    }
    toks_.push_back(std::move(t));
  }
  Token end;
  end.kind = Token::Kind::End;
  end.line = line;
  end.col = col;
  toks_.push_back(end);
}

const Token& Lexer::peek(size_t ahead) const {
  size_t k = pos_ + ahead;
  return k < toks_.size() ? toks_[k] : toks_.back();
}

Token Lexer::next() {
  Token t = peek();
  if (pos_ + 1 < toks_.size()) ++pos_;
  return t;
}

bool Lexer::try_punct(std::string_view p) {
  if (peek().kind == Token::Kind::Punct && peek().text == p) {
    next();
    return true;
  }
  return false;
}

bool Lexer::try_ident(std::string_view word) {
  if (peek().kind == Token::Kind::Ident && peek().text == word) {
    next();
    return true;
  }
  return false;
}

void Lexer::expect_punct(std::string_view p) {
  if (!try_punct(p)) fail("expected '" + std::string(p) + "', found '" + peek().text + "'");
}

std::string Lexer::expect_ident(const char* what) {
  if (peek().kind != Token::Kind::Ident)
    fail(std::string("expected ") + what + ", found '" + peek().text + "'");
  return next().text;
}

Rat Lexer::expect_number(const char* what) {
  bool neg = try_punct("-");
  if (peek().kind != Token::Kind::Number)
    fail(std::string("expected ") + what + ", found '" + peek().text + "'");
  std::string text = next().text;
  if (try_punct("/")) {
    if (peek().kind != Token::Kind::Number) fail("expected denominator");
    text += "/" + next().text;
  }
  auto r = Rat::parse(text);
  if (!r) fail("malformed number '" + text + "'");
  return neg ? -*r : *r;
}

void Lexer::fail(const std::string& msg) const { fail_at(peek(), msg); }

void Lexer::fail_at(const Token& t, const std::string& msg) const {
  throw ParseError(msg, t.line, t.col);
}

namespace {

Polynomial parse_factor(Lexer& lex, const NameResolver& resolve);

Polynomial parse_term(Lexer& lex, const NameResolver& resolve) {
  Polynomial p = parse_factor(lex, resolve);
  for (;;) {
    if (lex.try_punct("*")) {
      p *= parse_factor(lex, resolve);
    } else if (lex.peek().kind == Token::Kind::Punct && lex.peek().text == "/") {
      lex.next();
      Token at = lex.peek();
      Polynomial d = parse_factor(lex, resolve);
      if (!d.is_constant() || d.constant_value().is_zero())
        lex.fail_at(at, "division is only supported by a nonzero constant");
      p *= Rat(1) / d.constant_value();
    } else {
      break;
    }
  }
  return p;
}

Polynomial parse_factor(Lexer& lex, const NameResolver& resolve) {
  if (lex.try_punct("-")) return -parse_factor(lex, resolve);
  if (lex.try_punct("+")) return parse_factor(lex, resolve);
  Polynomial base;
  Token t = lex.peek();
  if (t.kind == Token::Kind::Number) {
    lex.next();
    auto r = Rat::parse(t.text);
    if (!r) lex.fail_at(t, "malformed number");
    base = Polynomial(*r);
  } else if (t.kind == Token::Kind::Ident) {
    lex.next();
    base = resolve(t.text, t);
  } else if (lex.try_punct("(")) {
    base = parse_expression(lex, resolve);
    lex.expect_punct(")");
  } else {
    lex.fail("expected expression");
  }
  if (lex.try_punct("^")) {
    Token e = lex.peek();
    if (e.kind != Token::Kind::Number) lex.fail("expected exponent");
    lex.next();
    auto r = Rat::parse(e.text);
    if (!r || !r->is_integer() || r->sign() < 0) lex.fail_at(e, "exponent must be a natural number");
    base = base.pow(static_cast<unsigned>(r->num().get_ui()));
  }
  return base;
}

}  // namespace

Polynomial parse_expression(Lexer& lex, const NameResolver& resolve) {
  Polynomial p = parse_term(lex, resolve);
  for (;;) {
    if (lex.try_punct("+"))
      p += parse_term(lex, resolve);
    else if (lex.try_punct("-"))
      p -= parse_term(lex, resolve);
    else
      break;
  }
  return p;
}

namespace {

// op in { <=, <, >=, >, =, ==, != } applied to lhs/rhs; equality expands to a
// conjunction, disequality to a disjunction of strict atoms.
GuardPtr cmp_guard(const std::string& op, const Polynomial& lhs, const Polynomial& rhs) {
  if (op == "<=") return Guard::mk_atom(LinearConstraint(rhs - lhs, false));
  if (op == "<") return Guard::mk_atom(LinearConstraint(rhs - lhs, true));
  if (op == ">=") return Guard::mk_atom(LinearConstraint(lhs - rhs, false));
  if (op == ">") return Guard::mk_atom(LinearConstraint(lhs - rhs, true));
  if (op == "=" || op == "==")
    return Guard::mk_and({Guard::mk_atom(LinearConstraint(rhs - lhs, false)),
                          Guard::mk_atom(LinearConstraint(lhs - rhs, false))});
  return Guard::mk_or({Guard::mk_atom(LinearConstraint(rhs - lhs, true)),
                       Guard::mk_atom(LinearConstraint(lhs - rhs, true))});
}

bool peek_cmp(Lexer& lex, std::string& op) {
  auto& t = lex.peek();
  if (t.kind != Token::Kind::Punct) return false;
  if (t.text == "<=" || t.text == "<" || t.text == ">=" || t.text == ">" || t.text == "=" ||
      t.text == "==" || t.text == "!=") {
    op = t.text;
    return true;
  }
  return false;
}

}  // namespace

GuardPtr parse_comparison(Lexer& lex, const NameResolver& resolve) {
  Polynomial lhs = parse_expression(lex, resolve);
  std::string op;
  if (!peek_cmp(lex, op)) lex.fail("expected comparison operator");
  std::vector<GuardPtr> parts;
  while (peek_cmp(lex, op)) {
    lex.next();
    Polynomial rhs = parse_expression(lex, resolve);
    parts.push_back(cmp_guard(op, lhs, rhs));
    lhs = std::move(rhs);
  }
  return Guard::mk_and(std::move(parts));
}

namespace {

GuardPtr parse_guard_not(Lexer& lex, const NameResolver& resolve, const BoolResolver& atoms) {
  if (lex.try_punct("!") || lex.try_ident("not"))
    return Guard::mk_not(parse_guard_not(lex, resolve, atoms));
  if (lex.try_ident("true")) return Guard::mk_true();
  if (lex.try_ident("false")) return Guard::mk_not(Guard::mk_true());
  if (atoms && lex.peek().kind == Token::Kind::Ident) {
    if (GuardPtr g = atoms(lex.peek().text, lex.peek())) {
      lex.next();
      return g;
    }
  }
  if (lex.peek().kind == Token::Kind::Punct && lex.peek().text == "(") {
    // Could be a parenthesised guard or a parenthesised arithmetic expression;
    // backtrack on comparison-shaped content.
    size_t mark = 0;
    // Scan for a comparison before the matching ')' at depth 1.
    int depth = 0;
    bool is_guard = false;
    for (size_t k = 0;; ++k) {
      const Token& t = lex.peek(k);
      if (t.kind == Token::Kind::End) break;
      if (t.kind == Token::Kind::Punct) {
        if (t.text == "(") ++depth;
        if (t.text == ")") {
          --depth;
          if (depth == 0) break;
        }
        if (t.text == "&&" || t.text == "||" || t.text == "<=" || t.text == "<" ||
            t.text == ">=" || t.text == ">" || t.text == "=" || t.text == "==" ||
            t.text == "!=" || t.text == "!") {
          is_guard = true;
          break;
        }
      }
      if (t.kind == Token::Kind::Ident && (t.text == "and" || t.text == "or")) {
        is_guard = true;
        break;
      }
      (void)mark;
    }
    if (is_guard) {
      lex.expect_punct("(");
      GuardPtr g = parse_guard(lex, resolve, atoms);
      lex.expect_punct(")");
      return g;
    }
  }
  return parse_comparison(lex, resolve);
}

GuardPtr parse_guard_and(Lexer& lex, const NameResolver& resolve, const BoolResolver& atoms) {
  std::vector<GuardPtr> parts{parse_guard_not(lex, resolve, atoms)};
  while (lex.try_ident("and") || lex.try_punct("&&"))
    parts.push_back(parse_guard_not(lex, resolve, atoms));
  return Guard::mk_and(std::move(parts));
}

}  // namespace

GuardPtr parse_guard(Lexer& lex, const NameResolver& resolve, const BoolResolver& atoms) {
  std::vector<GuardPtr> parts{parse_guard_and(lex, resolve, atoms)};
  while (lex.try_ident("or") || lex.try_punct("||"))
    parts.push_back(parse_guard_and(lex, resolve, atoms));
  return Guard::mk_or(std::move(parts));
}

}  // namespace qsc
