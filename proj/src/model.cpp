// SPDX-License-Identifier: Apache-2.0
#include "qsc/model.hpp"

#include <algorithm>

#include "qsc/lexer.hpp"

namespace qsc {

const StateVar* StateSpace::find(const std::string& name) const {
  for (auto& v : variables)
    if (v.name == name) return &v;
  return nullptr;
}

std::set<Symbol> StateSpace::symbols() const {
  std::set<Symbol> out;
  for (auto& v : variables) out.insert(v.symbol);
  return out;
}

std::set<Symbol> StateSpace::integer_symbols() const {
  std::set<Symbol> out;
  for (auto& v : variables)
    if (v.kind == VarKind::Integer) out.insert(v.symbol);
  return out;
}

Polyhedron StateSpace::domain_facts() const {
  Polyhedron p;
  for (auto& v : variables) {
    if (v.lo) p.add(LinearConstraint(var(v.symbol) - Polynomial(*v.lo)));
    if (v.hi) p.add(LinearConstraint(Polynomial(*v.hi) - var(v.symbol)));
  }
  return p;
}

Polynomial ProbBranch::update_of(Symbol v) const {
  auto it = updates.find(v);
  return it == updates.end() ? var(v) : it->second;
}

std::set<Symbol> Model::control_symbols() const {
  std::set<Symbol> out;
  for (auto& [s, box] : control_box) out.insert(s);
  return out;
}

size_t Model::firing_command(const std::map<Symbol, Rat>& state) const {
  for (size_t i = 0; i < commands.size(); ++i)
    if (commands[i].guard->evaluate(state)) return i;
  throw std::runtime_error("no command guard holds (kernel not total at this state)");
}

namespace {

struct ModelParser {
  Lexer lex;
  Model m;
  std::map<std::string, Symbol> state_names;
  std::map<std::string, Symbol> param_names;

  explicit ModelParser(std::string_view text) : lex(text) {}

  NameResolver state_resolver() {
    return [this](const std::string& n, const Token& t) -> Polynomial {
      auto it = state_names.find(n);
      if (it == state_names.end()) lex.fail_at(t, "unknown state variable '" + n + "'");
      return var(it->second);
    };
  }

  NameResolver param_resolver() {
    return [this](const std::string& n, const Token& t) -> Polynomial {
      auto it = param_names.find(n);
      if (it == param_names.end()) lex.fail_at(t, "unknown control parameter '" + n + "'");
      return var(it->second);
    };
  }

  // [a, b] | [a, inf) | (-inf, b] | (-inf, inf)
  std::pair<std::optional<Rat>, std::optional<Rat>> parse_interval() {
    std::optional<Rat> lo, hi;
    bool open_lo = lex.try_punct("(");
    if (!open_lo) lex.expect_punct("[");
    if (lex.try_punct("-")) {
      if (!lex.try_ident("inf")) lex.fail("expected 'inf'");
      if (!open_lo) lex.fail("-inf requires an open bound '('");
    } else {
      lo = lex.expect_number("lower bound");
    }
    lex.expect_punct(",");
    if (lex.try_ident("inf")) {
      if (!lex.try_punct(")")) lex.fail("inf requires an open bound ')'");
    } else {
      hi = lex.expect_number("upper bound");
      if (!lex.try_punct("]") && !lex.try_punct(")")) lex.fail("expected ']' or ')'");
    }
    if (lo && hi && *hi < *lo) lex.fail("empty interval");
    return {lo, hi};
  }

  void parse_var() {
    Token at = lex.peek();
    std::string name = lex.expect_ident("variable name");
    if (state_names.count(name) || param_names.count(name))
      lex.fail_at(at, "duplicate variable '" + name + "'");
    lex.expect_punct(":");
    VarKind kind;
    std::string k = lex.expect_ident("kind (int or real)");
    if (k == "int")
      kind = VarKind::Integer;
    else if (k == "real")
      kind = VarKind::Real;
    else
      lex.fail("variable kind must be 'int' or 'real'");
    StateVar v;
    v.name = name;
    v.symbol = sym(name);
    v.kind = kind;
    if (lex.try_ident("in")) {
      auto [lo, hi] = parse_interval();
      v.lo = lo;
      v.hi = hi;
    }
    lex.expect_punct(";");
    state_names[name] = v.symbol;
    m.space.variables.push_back(std::move(v));
  }

  void parse_init() {
    std::string name = lex.expect_ident("variable name");
    auto it = state_names.find(name);
    if (it == state_names.end()) lex.fail("unknown variable '" + name + "' in init");
    lex.expect_punct("=");
    Rat v = lex.expect_number("initial value");
    lex.expect_punct(";");
    m.initial[it->second] = v;
  }

  void parse_param() {
    Token at = lex.peek();
    std::string name = lex.expect_ident("parameter name");
    if (state_names.count(name) || param_names.count(name))
      lex.fail_at(at, "duplicate variable '" + name + "'");
    if (!lex.try_ident("in")) lex.fail("expected 'in'");
    auto [lo, hi] = parse_interval();
    if (!lo || !hi) lex.fail("control parameter box must be bounded");
    lex.expect_punct(";");
    Symbol s = sym(name);
    param_names[name] = s;
    m.control_box.emplace_back(s, std::make_pair(*lo, *hi));
  }

  void parse_frame() {
    if (!m.frame) m.frame.emplace();
    std::string name = lex.expect_ident("variable name");
    auto it = state_names.find(name);
    if (it == state_names.end()) lex.fail("unknown variable '" + name + "' in frame");
    if (!lex.try_ident("in")) lex.fail("expected 'in'");
    auto [lo, hi] = parse_interval();
    if (!lo || !hi) lex.fail("frame must be a bounded interval");
    lex.expect_punct(";");
    (*m.frame)[it->second] = {*lo, *hi};
  }

  void parse_when() {
    Command c;
    c.guard = parse_guard(lex, state_resolver());
    lex.expect_punct("->");
    lex.expect_punct("{");
    for (;;) {
      ProbBranch b;
      Token at = lex.peek();
      b.weight = parse_expression(lex, param_resolver());
      for (auto s : b.weight.variables())
        if (!m.control_symbols().count(s))
          lex.fail_at(at, "branch weight may only mention control parameters");
      lex.expect_punct(":");
      bool any_update = false;
      while (lex.peek().kind == Token::Kind::Ident && lex.peek(1).kind == Token::Kind::Punct &&
             lex.peek(1).text == "'") {
        Token vt = lex.peek();
        std::string vn = lex.expect_ident("variable");
        auto it = state_names.find(vn);
        if (it == state_names.end()) lex.fail_at(vt, "unknown state variable '" + vn + "'");
        lex.expect_punct("'");
        lex.expect_punct("=");
        Polynomial upd = parse_expression(lex, state_resolver());
        lex.expect_punct(";");
        if (b.updates.count(it->second)) lex.fail_at(vt, "duplicate update for '" + vn + "'");
        b.updates[it->second] = std::move(upd);
        any_update = true;
      }
      if (!any_update) lex.fail("branch needs at least one update (use x' = x to stay)");
      c.branches.push_back(std::move(b));
      if (lex.try_punct("}")) break;
    }
    m.commands.push_back(std::move(c));
  }

  Model run() {
    while (!lex.at_end()) {
      if (lex.try_ident("var")) {
        parse_var();
      } else if (lex.try_ident("init")) {
        parse_init();
      } else if (lex.try_ident("param")) {
        parse_param();
      } else if (lex.try_ident("frame")) {
        parse_frame();
      } else if (lex.try_ident("when")) {
        parse_when();
      } else {
        lex.fail("expected 'var', 'init', 'param', 'frame' or 'when', found '" + lex.peek().text +
                 "'");
      }
    }
    if (m.space.variables.empty()) throw ParseError("model declares no variables", 1, 1);
    if (m.commands.empty()) throw ParseError("model has no commands", 1, 1);
    for (auto& v : m.space.variables)
      if (!m.initial.count(v.symbol))
        throw ParseError("missing init for variable '" + v.name + "'", 1, 1);
    if (m.commands.back().guard->kind != Guard::Kind::True)
      throw ParseError("last command must be the catch-all 'when true'", 1, 1);
    return std::move(m);
  }
};

}  // namespace

Model parse_model(std::string_view text) { return ModelParser(text).run(); }

std::vector<std::string> validate_model(const Model& m) {
  std::vector<std::string> diags;
  for (size_t i = 0; i < m.commands.size(); ++i) {
    Polynomial sum;
    for (auto& b : m.commands[i].branches) sum += b.weight;
    if (sum != Polynomial(Rat(1)))
      diags.push_back("command " + std::to_string(i + 1) + ": branch weights sum to " +
                      sum.to_string() + ", not 1");
    // Corner evaluation of affine weights over the control box.
    for (size_t j = 0; j < m.commands[i].branches.size(); ++j) {
      const Polynomial& w = m.commands[i].branches[j].weight;
      std::set<Symbol> wvars = w.variables();
      bool affine = w.total_degree() <= 1;
      if (!affine) continue;  // range enforced by SMT side constraints instead
      // Enumerate box corners of the parameters that occur in w.
      std::vector<std::pair<Symbol, std::pair<Rat, Rat>>> boxes;
      for (auto& [s, box] : m.control_box)
        if (wvars.count(s)) boxes.push_back({s, box});
      size_t corners = size_t{1} << boxes.size();
      for (size_t mask = 0; mask < corners; ++mask) {
        std::map<Symbol, Rat> corner;
        for (size_t k = 0; k < boxes.size(); ++k)
          corner[boxes[k].first] = (mask >> k) & 1 ? boxes[k].second.second : boxes[k].second.first;
        Rat v = w.evaluate(corner);
        if (v.sign() < 0 || v > Rat(1)) {
          diags.push_back("command " + std::to_string(i + 1) + " branch " + std::to_string(j + 1) +
                          ": weight " + w.to_string() + " evaluates to " + v.to_string() +
                          " at a control-box corner");
          break;
        }
      }
    }
  }
  for (auto& v : m.space.variables) {
    const Rat& x0 = m.initial.at(v.symbol);
    if ((v.lo && x0 < *v.lo) || (v.hi && x0 > *v.hi))
      diags.push_back("initial value of '" + v.name + "' lies outside its declared domain");
    if (v.kind == VarKind::Integer && !x0.is_integer())
      diags.push_back("initial value of '" + v.name + "' is not an integer");
  }
  bool some_guard = false;
  for (auto& c : m.commands)
    if (c.guard->evaluate(m.initial)) some_guard = true;
  if (!some_guard) diags.push_back("no command guard holds at the initial state");
  return diags;
}

std::map<Symbol, Rat> sample_step(const Model& m, const std::map<Symbol, Rat>& state,
                                  const std::map<Symbol, Rat>& kappa, std::mt19937_64& rng) {
  const Command& cmd = m.commands[m.firing_command(state)];
  // u = r / 2^64 compared exactly against cumulative rational weights.
  std::uint64_t r = rng();
  Rat u = Rat(mpz_class(static_cast<unsigned long>(r))) / Rat(mpz_class(mpz_class(1) << 64));
  Rat acc(0);
  const ProbBranch* chosen = &cmd.branches.back();
  for (auto& b : cmd.branches) {
    acc += b.weight.evaluate(kappa);
    if (u < acc) {
      chosen = &b;
      break;
    }
  }
  std::map<Symbol, Rat> next;
  for (auto& v : m.space.variables) next[v.symbol] = chosen->update_of(v.symbol).evaluate(state);
  return next;
}

}  // namespace qsc
