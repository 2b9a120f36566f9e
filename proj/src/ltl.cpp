// SPDX-License-Identifier: Apache-2.0
#include "qsc/ltl.hpp"

#include "qsc/lexer.hpp"

namespace qsc {

LtlPtr Ltl::mk_atom(GuardPtr g) {
  auto f = std::make_shared<Ltl>();
  f->op = Op::Atom;
  f->atom = std::move(g);
  return f;
}

LtlPtr Ltl::mk(Op op, std::vector<LtlPtr> sub) {
  auto f = std::make_shared<Ltl>();
  f->op = op;
  f->sub = std::move(sub);
  return f;
}

bool Ltl::propositional() const {
  switch (op) {
    case Op::Atom:
      return true;
    case Op::Not:
    case Op::And:
    case Op::Or:
    case Op::Imply:
      for (auto& s : sub)
        if (!s->propositional()) return false;
      return true;
    default:
      return false;
  }
}

std::string Ltl::to_string() const {
  switch (op) {
    case Op::Atom:
      return "(" + atom->to_string() + ")";
    case Op::Not:
      return "!" + sub[0]->to_string();
    case Op::And:
      return "(" + sub[0]->to_string() + " and " + sub[1]->to_string() + ")";
    case Op::Or:
      return "(" + sub[0]->to_string() + " or " + sub[1]->to_string() + ")";
    case Op::Imply:
      return "(" + sub[0]->to_string() + " -> " + sub[1]->to_string() + ")";
    case Op::Next:
      return "X " + sub[0]->to_string();
    case Op::Eventually:
      return "F " + sub[0]->to_string();
    case Op::Always:
      return "G " + sub[0]->to_string();
    case Op::Until:
      return "(" + sub[0]->to_string() + " U " + sub[1]->to_string() + ")";
  }
  return "?";
}

namespace {

bool temporal_word(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c != 'X' && c != 'F' && c != 'G') return false;
  return true;
}

struct LtlParser {
  Lexer& lex;
  const StateSpace& space;

  NameResolver resolver() {
    return [this](const std::string& n, const Token& t) -> Polynomial {
      const StateVar* v = space.find(n);
      if (!v) lex.fail_at(t, "unknown atom or variable '" + n + "'");
      return var(v->symbol);
    };
  }

  bool is_state_var(const std::string& n) const { return space.find(n) != nullptr; }

  LtlPtr parse_unary() {
    const Token& t = lex.peek();
    if (t.kind == Token::Kind::Punct && (t.text == "!")) {
      lex.next();
      return Ltl::mk(Ltl::Op::Not, {parse_unary()});
    }
    if (t.kind == Token::Kind::Ident && t.text == "not") {
      lex.next();
      return Ltl::mk(Ltl::Op::Not, {parse_unary()});
    }
    if (t.kind == Token::Kind::Ident && temporal_word(t.text) && !is_state_var(t.text)) {
      std::string ops = lex.next().text;
      LtlPtr f = parse_unary();
      for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        Ltl::Op op = *it == 'X'   ? Ltl::Op::Next
                     : *it == 'F' ? Ltl::Op::Eventually
                                  : Ltl::Op::Always;
        f = Ltl::mk(op, {f});
      }
      return f;
    }
    if (t.kind == Token::Kind::Punct && t.text == "(") {
      // A parenthesised formula or an inline comparison starting with '('.
      // Try formula first; comparisons are formulas too (atoms).
      lex.next();
      LtlPtr f = parse_imply();
      lex.expect_punct(")");
      return f;
    }
    // Inline comparison atom.
    return Ltl::mk_atom(parse_comparison(lex, resolver()));
  }

  LtlPtr parse_until() {
    LtlPtr f = parse_unary();
    if (lex.peek().kind == Token::Kind::Ident && lex.peek().text == "U") {
      lex.next();
      return Ltl::mk(Ltl::Op::Until, {f, parse_until()});
    }
    return f;
  }

  LtlPtr parse_and() {
    LtlPtr f = parse_until();
    while (lex.try_ident("and") || lex.try_punct("&&") || lex.try_punct("&"))
      f = Ltl::mk(Ltl::Op::And, {f, parse_until()});
    return f;
  }

  LtlPtr parse_or() {
    LtlPtr f = parse_and();
    while (lex.try_ident("or") || lex.try_punct("||") || lex.try_punct("|"))
      f = Ltl::mk(Ltl::Op::Or, {f, parse_and()});
    return f;
  }

  LtlPtr parse_imply() {
    LtlPtr f = parse_or();
    if (lex.try_punct("->")) return Ltl::mk(Ltl::Op::Imply, {f, parse_imply()});
    return f;
  }
};

}  // namespace

LtlPtr parse_ltl(std::string_view text, const StateSpace& space) {
  Lexer lex(text);
  LtlParser p{lex, space};
  LtlPtr f = p.parse_imply();
  if (!lex.at_end()) lex.fail("trailing input after formula");
  return f;
}

namespace {

LtlPtr positive(const LtlPtr& f);

// not(f), pushed through the dualities.
LtlPtr negated(const LtlPtr& f) {
  using Op = Ltl::Op;
  switch (f->op) {
    case Op::Atom:
      return Ltl::mk(Op::Not, {f});
    case Op::Not:
      return positive(f->sub[0]);
    case Op::And:
      return Ltl::mk(Op::Or, {negated(f->sub[0]), negated(f->sub[1])});
    case Op::Or:
      return Ltl::mk(Op::And, {negated(f->sub[0]), negated(f->sub[1])});
    case Op::Imply:
      return Ltl::mk(Op::And, {positive(f->sub[0]), negated(f->sub[1])});
    case Op::Next:
      return Ltl::mk(Op::Next, {negated(f->sub[0])});
    case Op::Eventually:
      return Ltl::mk(Op::Always, {negated(f->sub[0])});
    case Op::Always:
      return Ltl::mk(Op::Eventually, {negated(f->sub[0])});
    case Op::Until: {
      // not(a U b) = ((!b) U (!a and !b)) or G !b
      LtlPtr na = negated(f->sub[0]), nb = negated(f->sub[1]);
      LtlPtr until = Ltl::mk(Op::Until, {nb, Ltl::mk(Op::And, {na, nb})});
      return Ltl::mk(Op::Or, {until, Ltl::mk(Op::Always, {nb})});
    }
  }
  return f;
}

// Identity, but eliminates double negation along the way.
LtlPtr positive(const LtlPtr& f) {
  using Op = Ltl::Op;
  switch (f->op) {
    case Op::Atom:
      return f;
    case Op::Not:
      return negated(f->sub[0]);
    default: {
      std::vector<LtlPtr> sub;
      for (auto& s : f->sub) sub.push_back(positive(s));
      return Ltl::mk(f->op, std::move(sub));
    }
  }
}

}  // namespace

LtlPtr negate_ltl(const LtlPtr& f) { return negated(f); }

}  // namespace qsc
