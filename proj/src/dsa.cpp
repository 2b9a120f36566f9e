// SPDX-License-Identifier: Apache-2.0
#include "qsc/dsa.hpp"

#include <algorithm>

#include "qsc/lexer.hpp"

namespace qsc {

int Dsa::index_of(const std::string& name) const {
  for (int i = 0; i < state_count(); ++i)
    if (state_names[i] == name) return i;
  return -1;
}

int Dsa::step(int q, const std::map<Symbol, Rat>& state) const {
  for (auto& e : edges[q])
    if (e.guard->evaluate(state)) return e.target;
  throw std::logic_error("automaton not total at state " + state_names[q]);
}

void Dsa::validate() const {
  if (state_names.empty()) throw std::runtime_error("automaton has no states");
  if (initial < 0 || initial >= state_count()) throw std::runtime_error("bad initial state");
  if (edges.size() != state_names.size()) throw std::runtime_error("missing edge lists");
  for (int q = 0; q < state_count(); ++q) {
    if (edges[q].empty() || edges[q].back().guard->kind != Guard::Kind::True)
      throw std::runtime_error("state " + state_names[q] +
                               ": final catch-all [true] edge is required");
    for (auto& e : edges[q])
      if (e.target < 0 || e.target >= state_count())
        throw std::runtime_error("state " + state_names[q] + ": edge to unknown state");
  }
  for (auto& p : pairs)
    for (auto qset : {&p.fset, &p.gset})
      for (int q : *qset)
        if (q < 0 || q >= state_count())
          throw std::runtime_error("acceptance pair references an unknown state");
}

namespace {

GuardPtr prop_to_guard(const LtlPtr& f) {
  using Op = Ltl::Op;
  switch (f->op) {
    case Op::Atom:
      return f->atom;
    case Op::Not:
      return Guard::mk_not(prop_to_guard(f->sub[0]));
    case Op::And:
      return Guard::mk_and({prop_to_guard(f->sub[0]), prop_to_guard(f->sub[1])});
    case Op::Or:
      return Guard::mk_or({prop_to_guard(f->sub[0]), prop_to_guard(f->sub[1])});
    case Op::Imply:
      return Guard::mk_or({Guard::mk_not(prop_to_guard(f->sub[0])), prop_to_guard(f->sub[1])});
    default:
      throw UnsupportedPattern("not a propositional subformula: " + f->to_string());
  }
}

std::set<int> all_states(int n) {
  std::set<int> out;
  for (int i = 0; i < n; ++i) out.insert(i);
  return out;
}

// 2-state automaton reaching an absorbing accepting state on `a`.
// Acceptance: F = Q, G = {q1}.
Dsa build_eventually(const GuardPtr& a) {
  Dsa d;
  d.state_names = {"q0", "q1"};
  d.initial = 0;
  d.edges = {{{a, 1}, {Guard::mk_true(), 0}}, {{Guard::mk_true(), 1}}};
  d.pairs = {{all_states(2), {1}}};
  return d;
}

// 2-state safety automaton; q1 is the absorbing violation state.
// Acceptance: F = {q1}, G = {}.
Dsa build_always(const GuardPtr& a) {
  Dsa d;
  d.state_names = {"q0", "q1"};
  d.initial = 0;
  d.edges = {{{a, 0}, {Guard::mk_true(), 1}}, {{Guard::mk_true(), 1}}};
  d.pairs = {{{1}, {}}};
  return d;
}

// 2-state label tracker: q1 after reading a, q0 otherwise.
Dsa build_tracker1(const GuardPtr& a) {
  Dsa d;
  d.state_names = {"q0", "q1"};
  d.initial = 0;
  std::vector<Dsa::Edge> es = {{a, 1}, {Guard::mk_true(), 0}};
  d.edges = {es, es};
  return d;
}

// 4-state label tracker over (a, b): q0 = neither, q1 = a only, q2 = both,
// q3 = b only; the initial state doubles as "nothing read yet".
Dsa build_tracker2(const GuardPtr& a, const GuardPtr& b) {
  Dsa d;
  d.state_names = {"q0", "q1", "q2", "q3"};
  d.initial = 0;
  std::vector<Dsa::Edge> es = {{Guard::mk_and({a, b}), 2}, {a, 1}, {b, 3}, {Guard::mk_true(), 0}};
  d.edges = {es, es, es, es};
  return d;
}

// 3-state until automaton: q2 = satisfied sink, q1 = violated sink.
Dsa build_until(const GuardPtr& a, const GuardPtr& b) {
  Dsa d;
  d.state_names = {"q0", "q1", "q2"};
  d.initial = 0;
  d.edges = {{{b, 2}, {a, 0}, {Guard::mk_true(), 1}},
             {{Guard::mk_true(), 1}},
             {{Guard::mk_true(), 2}}};
  d.pairs = {{all_states(3), {2}}};
  return d;
}

// 3-state stabilise-while-avoid automaton for a U G b; q2 tracks the b-streak
// and may fall back to q0, q1 is the absorbing violation state.
// Acceptance: F = {q0, q1}, G = {}.
Dsa build_until_always(const GuardPtr& a, const GuardPtr& b) {
  Dsa d;
  d.state_names = {"q0", "q1", "q2"};
  d.initial = 0;
  std::vector<Dsa::Edge> waiting = {{b, 2}, {a, 0}, {Guard::mk_true(), 1}};
  d.edges = {waiting, {{Guard::mk_true(), 1}}, waiting};
  d.pairs = {{{0, 1}, {}}};
  return d;
}

}  // namespace

Dsa ltl_to_dsa(const LtlPtr& f) {
  using Op = Ltl::Op;
  auto prop = [](const LtlPtr& g) { return g->propositional(); };

  // a U G b, a U b
  if (f->op == Op::Until && prop(f->sub[0])) {
    const LtlPtr& rhs = f->sub[1];
    if (rhs->op == Op::Always && prop(rhs->sub[0]))
      return build_until_always(prop_to_guard(f->sub[0]), prop_to_guard(rhs->sub[0]));
    if (prop(rhs)) return build_until(prop_to_guard(f->sub[0]), prop_to_guard(rhs));
  }
  // F a, FG a
  if (f->op == Op::Eventually) {
    if (prop(f->sub[0])) return build_eventually(prop_to_guard(f->sub[0]));
    if (f->sub[0]->op == Op::Always && prop(f->sub[0]->sub[0])) {
      Dsa d = build_tracker1(prop_to_guard(f->sub[0]->sub[0]));
      d.pairs = {{{0}, {}}};  // q0 (a failed) only finitely often
      return d;
    }
  }
  // G a, GF a
  if (f->op == Op::Always) {
    if (prop(f->sub[0])) return build_always(prop_to_guard(f->sub[0]));
    if (f->sub[0]->op == Op::Eventually && prop(f->sub[0]->sub[0])) {
      Dsa d = build_tracker1(prop_to_guard(f->sub[0]->sub[0]));
      d.pairs = {{all_states(2), {1}}};  // q1 (a held) infinitely often
      return d;
    }
  }
  auto is_gf = [&](const LtlPtr& g) {
    return g->op == Op::Always && g->sub[0]->op == Op::Eventually && prop(g->sub[0]->sub[0]);
  };
  auto is_fg = [&](const LtlPtr& g) {
    return g->op == Op::Eventually && g->sub[0]->op == Op::Always && prop(g->sub[0]->sub[0]);
  };
  // GF a -> GF b (single Streett pair on the label tracker)
  if (f->op == Op::Imply && is_gf(f->sub[0]) && is_gf(f->sub[1])) {
    GuardPtr a = prop_to_guard(f->sub[0]->sub[0]->sub[0]);
    GuardPtr b = prop_to_guard(f->sub[1]->sub[0]->sub[0]);
    Dsa d = build_tracker2(a, b);
    d.pairs = {{{1, 2}, {2, 3}}};  // a-states finitely often, or b-states infinitely
    return d;
  }
  // GF a and FG b (two pairs on the label tracker)
  if (f->op == Op::And) {
    LtlPtr lhs = f->sub[0], rhs = f->sub[1];
    if (is_fg(lhs) && is_gf(rhs)) std::swap(lhs, rhs);
    if (is_gf(lhs) && is_fg(rhs)) {
      GuardPtr a = prop_to_guard(lhs->sub[0]->sub[0]);
      GuardPtr b = prop_to_guard(rhs->sub[0]->sub[0]);
      Dsa d = build_tracker2(a, b);
      d.pairs = {{all_states(4), {1, 2}},  // GF a: a-states infinitely often
                 {{0, 1}, {}}};            // FG b: not-b-states finitely often
      return d;
    }
  }
  throw UnsupportedPattern(
      "no DSA pattern for '" + f->to_string() +
      "'; supported: F a, G a, FG a, GF a, GF a -> GF b, GF a and FG b, a U b, a U G b "
      "(a, b propositional) -- provide a DSA file for other specifications");
}

Dsa parse_dsa(std::string_view text, const StateSpace& space) {
  Lexer lex(text);
  Dsa d;
  std::map<std::string, GuardPtr> atoms;
  std::vector<std::pair<std::string, Token>> pending_pairs_f, pending_pairs_g;

  NameResolver vars = [&](const std::string& n, const Token& t) -> Polynomial {
    const StateVar* v = space.find(n);
    if (!v) lex.fail_at(t, "unknown state variable '" + n + "'");
    return var(v->symbol);
  };
  BoolResolver bools = [&](const std::string& n, const Token&) -> GuardPtr {
    auto it = atoms.find(n);
    return it == atoms.end() ? nullptr : it->second;
  };

  std::map<std::string, std::vector<Dsa::Edge>> edge_map;

  while (!lex.at_end()) {
    if (lex.try_ident("states")) {
      while (lex.peek().kind == Token::Kind::Ident) d.state_names.push_back(lex.next().text);
      lex.expect_punct(";");
    } else if (lex.try_ident("initial")) {
      Token t = lex.peek();
      std::string n = lex.expect_ident("state name");
      d.initial = d.index_of(n);
      if (d.initial < 0) lex.fail_at(t, "unknown state '" + n + "'");
      lex.expect_punct(";");
    } else if (lex.try_ident("atom")) {
      Token t = lex.peek();
      std::string n = lex.expect_ident("atom name");
      if (space.find(n)) lex.fail_at(t, "atom name collides with state variable '" + n + "'");
      lex.expect_punct(":");
      atoms[n] = parse_guard(lex, vars, bools);
      lex.expect_punct(";");
    } else if (lex.try_ident("from")) {
      Token t = lex.peek();
      std::string from = lex.expect_ident("state name");
      if (d.index_of(from) < 0) lex.fail_at(t, "unknown state '" + from + "'");
      lex.expect_punct(":");
      auto& es = edge_map[from];
      for (;;) {
        lex.expect_punct("[");
        GuardPtr g = parse_guard(lex, vars, bools);
        lex.expect_punct("]");
        lex.expect_punct("->");
        Token tt = lex.peek();
        std::string to = lex.expect_ident("state name");
        int target = d.index_of(to);
        if (target < 0) lex.fail_at(tt, "unknown state '" + to + "'");
        lex.expect_punct(";");
        es.push_back({g, target});
        if (lex.peek().kind != Token::Kind::Punct || lex.peek().text != "[") break;
      }
    } else if (lex.try_ident("pair")) {
      Dsa::StreettPair p;
      auto parse_set = [&](const char* which) {
        std::set<int> out;
        if (!lex.try_ident(which)) lex.fail(std::string("expected '") + which + "'");
        lex.expect_punct("=");
        lex.expect_punct("{");
        while (lex.peek().kind == Token::Kind::Ident) {
          Token t = lex.peek();
          std::string n = lex.next().text;
          int q = d.index_of(n);
          if (q < 0) lex.fail_at(t, "unknown state '" + n + "' in acceptance pair");
          out.insert(q);
          lex.try_punct(",");
        }
        lex.expect_punct("}");
        return out;
      };
      p.fset = parse_set("F");
      p.gset = parse_set("G");
      lex.expect_punct(";");
      d.pairs.push_back(std::move(p));
    } else {
      lex.fail("expected 'states', 'initial', 'atom', 'from' or 'pair', found '" +
               lex.peek().text + "'");
    }
  }

  d.edges.resize(d.state_names.size());
  for (int q = 0; q < d.state_count(); ++q) {
    auto it = edge_map.find(d.state_names[q]);
    if (it == edge_map.end())
      throw std::runtime_error("state " + d.state_names[q] + " has no edges");
    d.edges[q] = it->second;
  }
  d.validate();

  // Reachability warning only; unreachable states are accepted.
  std::set<int> reached{d.initial};
  std::vector<int> work{d.initial};
  while (!work.empty()) {
    int q = work.back();
    work.pop_back();
    for (auto& e : d.edges[q])
      if (reached.insert(e.target).second) work.push_back(e.target);
  }
  for (int q = 0; q < d.state_count(); ++q)
    if (!reached.count(q))
      d.warnings.push_back("state " + d.state_names[q] + " is unreachable from the initial state");
  return d;
}

}  // namespace qsc
