// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qsc/geometry.hpp"

namespace qsc {

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
  int line, col;
};

struct Token {
  enum class Kind { Ident, Number, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 0, col = 0;
};

/// Hand-rolled tokenizer shared by the model DSL, LTL, DSA and certificate
/// parsers. `#` starts a line comment. Multi-char puncts: -> <= >= != == &&  ||
class Lexer {
public:
  explicit Lexer(std::string_view text);

  const Token& peek(size_t ahead = 0) const;
  Token next();
  bool at_end() const { return peek().kind == Token::Kind::End; }

  bool try_punct(std::string_view p);
  bool try_ident(std::string_view word);
  void expect_punct(std::string_view p);
  std::string expect_ident(const char* what);
  Rat expect_number(const char* what);

  [[noreturn]] void fail(const std::string& msg) const;
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const;

private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
};

/// Resolves a name occurring in an expression to a polynomial (typically a
/// variable); throws ParseError for unknown names.
using NameResolver = std::function<Polynomial(const std::string&, const Token&)>;

/// expr := term (('+'|'-') term)* ; term := factor ('*' factor | '/' number)* ;
/// factor := ('-')* (number | name | '(' expr ')') ('^' nat)?
Polynomial parse_expression(Lexer& lex, const NameResolver& resolve);

/// Comparison chains: e1 op e2 (op e3)* with op in <= < >= > = == !=.
/// Yields a conjunction/disjunction Guard over linear-constraint atoms.
GuardPtr parse_comparison(Lexer& lex, const NameResolver& resolve);

/// Resolves a bare identifier to a named Boolean atom (DSA guard files);
/// returns null when the name is not a declared atom.
using BoolResolver = std::function<GuardPtr(const std::string&, const Token&)>;

/// guard := gor ; gor := gand ('or'|'||' gand)* ; gand := gnot ('and'|'&&' gnot)*
/// gnot := ('!'|'not') gnot | 'true' | 'false' | '(' guard ')' | named atom | comparison
GuardPtr parse_guard(Lexer& lex, const NameResolver& resolve, const BoolResolver& atoms = {});

}  // namespace qsc
