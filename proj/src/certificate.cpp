// SPDX-License-Identifier: Apache-2.0
#include "qsc/certificate.hpp"

#include <algorithm>
#include <sstream>

#include "qsc/lexer.hpp"

namespace qsc {

namespace {

void enumerate_monomials(const std::vector<Symbol>& vars, unsigned degree, size_t from,
                         Monomial& cur, std::vector<Monomial>& out) {
  out.push_back(cur);
  if (degree == 0) return;
  for (size_t i = from; i < vars.size(); ++i) {
    if (!cur.factors.empty() && cur.factors.back().first == vars[i])
      cur.factors.back().second++;
    else
      cur.factors.emplace_back(vars[i], 1);
    enumerate_monomials(vars, degree - 1, i, cur, out);
    if (cur.factors.back().second == 1)
      cur.factors.pop_back();
    else
      cur.factors.back().second--;
  }
}

/// All monomials over `vars` with total degree <= d, deterministic order.
std::vector<Monomial> monomials_up_to(const std::vector<Symbol>& vars, unsigned d) {
  std::vector<Monomial> out;
  Monomial cur;
  enumerate_monomials(vars, d, 0, cur, out);
  return out;
}

// Updates of `x` across the whole model, as integer shifts; nullopt when some
// update is not of the form x <- x + c.
bool all_updates_shift(const Model& m, Symbol x) {
  for (auto& cmd : m.commands)
    for (auto& b : cmd.branches) {
      Polynomial delta = b.update_of(x) - var(x);
      if (!delta.is_constant() || !delta.constant_value().is_integer()) return false;
    }
  return true;
}

}  // namespace

bool TemplateSet::uses(Symbol s) const {
  for (auto& vi : values)
    for (auto& piece : vi) {
      if (piece.poly.uses(s)) return true;
      if (piece.exp && (piece.exp->coeff.uses(s) || piece.exp->base.uses(s))) return true;
    }
  for (auto& r : invariant)
    for (auto& [v, b] : r.box) {
      if (b.first && b.first->uses(s)) return true;
      if (b.second && b.second->uses(s)) return true;
    }
  return eps.uses(s) || bigm.uses(s);
}

TemplateSet build_templates(const ProductModel& p, const TemplateOptions& opt) {
  TemplateSet t;
  t.degree = opt.degree;
  const int nq = p.automaton.state_count();
  const int k = p.pair_count();
  const auto& pfx = opt.symbol_prefix;

  std::vector<Symbol> state_vars;
  for (auto& v : p.base.space.variables) state_vars.push_back(v.symbol);
  std::sort(state_vars.begin(), state_vars.end(),
            [](Symbol a, Symbol b) { return SymbolTable::instance().name_less(a, b); });

  auto fresh = [&](const std::string& name) {
    Symbol s = sym(pfx + name);
    t.unknowns.push_back(s);
    return s;
  };

  // Invariant template first: Full pieces force degree 0 below.
  t.invariant.resize(nq);
  for (int q = 0; q < nq; ++q) {
    const std::string& qn = p.automaton.state_names[q];
    auto ov = opt.invariant_overrides.find(qn);
    RegionPiece r;
    if (ov != opt.invariant_overrides.end() && ov->second.kind != RegionKind::Box) {
      r.kind = ov->second.kind;
    } else {
      r.kind = RegionKind::Box;
      for (auto& v : p.base.space.variables) {
        RegionSpec::Side lo_side, hi_side;
        if (ov != opt.invariant_overrides.end()) {
          auto it = ov->second.box.find(v.symbol);
          if (it != ov->second.box.end()) {
            lo_side = it->second.first;
            hi_side = it->second.second;
          }
        }
        RegionBound plo, phi;
        if (!lo_side.unbounded)
          plo = lo_side.value ? Polynomial(*lo_side.value)
                              : Polynomial(var(fresh("lo_" + qn + "_" + v.name)));
        if (!hi_side.unbounded)
          phi = hi_side.value ? Polynomial(*hi_side.value)
                              : Polynomial(var(fresh("hi_" + qn + "_" + v.name)));
        r.box[v.symbol] = {plo, phi};
      }
    }
    t.invariant[q] = std::move(r);
  }

  if (opt.exponential) {
    if (state_vars.size() != 1 || p.base.space.variables[0].kind != VarKind::Integer)
      throw std::runtime_error(
          "exponential template requires a single integer state variable");
    if (!all_updates_shift(p.base, state_vars[0]))
      throw std::runtime_error(
          "exponential template requires every update to be an integer shift x' = x + c");
    t.exp_base = fresh("base");
  }

  t.values.resize(k + 1);
  for (int i = 0; i <= k; ++i) {
    t.values[i].resize(nq);
    for (int q = 0; q < nq; ++q) {
      const std::string& qn = p.automaton.state_names[q];
      unsigned d = t.invariant[q].kind == RegionKind::Full ? 0 : opt.degree;
      PieceFun piece;
      auto monos = monomials_up_to(state_vars, d);
      for (size_t mi = 0; mi < monos.size(); ++mi) {
        Symbol c = fresh("c" + std::to_string(i) + "_" + qn + "_" + std::to_string(mi));
        piece.poly += Polynomial::term(Rat(1), Monomial{{{c, 1}}}) *
                      Polynomial::term(Rat(1), monos[mi]);
      }
      if (opt.exponential && i == 0) {
        ExpAtom e;
        e.coeff = var(fresh("ec_" + qn));
        e.base = var(*t.exp_base);
        e.xvar = state_vars[0];
        e.offset = Rat(0);
        piece.exp = e;
      }
      t.values[i][q] = std::move(piece);
    }
  }

  t.eps = var(fresh("eps"));
  t.bigm = var(fresh("M"));
  return t;
}

void apply_sink_heuristics(TemplateSet& t, const std::vector<SinkStatus>& sinks) {
  for (size_t q = 0; q < sinks.size(); ++q) {
    if (sinks[q] == SinkStatus::SurelyAccepting) {
      for (auto& vi : t.values) {
        vi[q].poly = Polynomial();
        vi[q].exp.reset();
      }
      t.invariant[q].kind = RegionKind::Full;
      t.invariant[q].box.clear();
    } else if (sinks[q] == SinkStatus::SurelyRejecting) {
      t.values[0][q].poly = Polynomial(Rat(1));
      t.values[0][q].exp.reset();
      t.invariant[q].kind = RegionKind::Empty;
      t.invariant[q].box.clear();
    }
  }
  // Unknowns fixed away by the heuristics disappear from the declaration list.
  std::vector<Symbol> kept;
  for (Symbol s : t.unknowns)
    if (t.uses(s)) kept.push_back(s);
  t.unknowns = std::move(kept);
}

CertificateInstance instantiate(const TemplateSet& t, const ProductModel& p,
                                const std::map<Symbol, Rat>& assignment, const Rat& eps,
                                const Rat& bigm, const std::map<std::string, Rat>& kappa,
                                const Rat& bound_p, unsigned handelman_degree) {
  CertificateInstance c;
  c.state_names = p.automaton.state_names;
  c.eps = eps;
  c.bigm = bigm;
  c.kappa = kappa;
  c.bound_p = bound_p;
  c.handelman_degree = handelman_degree;
  if (eps.sign() <= 0) throw std::runtime_error("certificate requires eps > 0");
  if (bigm.sign() <= 0) throw std::runtime_error("certificate requires M > 0");

  std::set<Symbol> state_syms = p.base.space.symbols();
  auto resolve_poly = [&](const Polynomial& poly) {
    Polynomial r = poly.substitute_values(assignment);
    for (auto s : r.variables())
      if (!state_syms.count(s))
        throw std::runtime_error("unresolved symbol '" + sym_name(s) + "' in certificate");
    return r;
  };
  auto resolve_const = [&](const Polynomial& poly, const char* what) {
    Polynomial r = poly.substitute_values(assignment);
    if (!r.is_constant())
      throw std::runtime_error(std::string("unresolved symbol in ") + what + ": " + r.to_string());
    return r.constant_value();
  };

  c.values.resize(t.values.size());
  for (size_t i = 0; i < t.values.size(); ++i) {
    c.values[i].resize(t.values[i].size());
    for (size_t q = 0; q < t.values[i].size(); ++q) {
      PieceFun piece;
      piece.poly = resolve_poly(t.values[i][q].poly);
      if (t.values[i][q].exp) {
        ExpAtom e = *t.values[i][q].exp;
        e.coeff = Polynomial(resolve_const(e.coeff, "exponential coefficient"));
        e.base = Polynomial(resolve_const(e.base, "exponential base"));
        if (!e.coeff.is_constant() || e.base.constant_value() <= Rat(0) ||
            e.base.constant_value() >= Rat(1))
          throw std::runtime_error("exponential base must lie in (0,1)");
        piece.exp = std::move(e);
      }
      c.values[i][q] = std::move(piece);
    }
  }
  c.invariant.resize(t.invariant.size());
  for (size_t q = 0; q < t.invariant.size(); ++q) {
    RegionPiece r;
    r.kind = t.invariant[q].kind;
    for (auto& [v, b] : t.invariant[q].box) {
      RegionBound lo, hi;
      if (b.first) lo = Polynomial(resolve_const(*b.first, "invariant bound"));
      if (b.second) hi = Polynomial(resolve_const(*b.second, "invariant bound"));
      if (lo && hi && hi->constant_value() < lo->constant_value())
        throw std::runtime_error("inverted invariant box for " + sym_name(v) + " at state " +
                                 c.state_names[q]);
      r.box[v] = {lo, hi};
    }
    c.invariant[q] = std::move(r);
  }
  return c;
}

std::string write_certificate(const CertificateInstance& c) {
  std::ostringstream os;
  os << "# certificate: V_0..V_k per automaton state, invariant boxes, margins\n";
  for (auto& s : c.state_names) os << "state " << s << "\n";
  os << "p " << c.bound_p << "\n";
  os << "epsilon " << c.eps << "\n";
  os << "M " << c.bigm << "\n";
  os << "handelman " << c.handelman_degree << "\n";
  for (auto& [name, v] : c.kappa) os << "kappa " << name << " " << v << "\n";
  for (size_t q = 0; q < c.invariant.size(); ++q) {
    os << "invariant " << c.state_names[q] << " ";
    switch (c.invariant[q].kind) {
      case RegionKind::Full:
        os << "full";
        break;
      case RegionKind::Empty:
        os << "empty";
        break;
      case RegionKind::Box:
        os << "box";
        for (auto& [v, b] : c.invariant[q].box) {
          os << " " << sym_name(v) << " ";
          if (b.first)
            os << b.first->constant_value();
          else
            os << "-inf";
          os << " ";
          if (b.second)
            os << b.second->constant_value();
          else
            os << "inf";
        }
        break;
    }
    os << "\n";
  }
  for (size_t i = 0; i < c.values.size(); ++i)
    for (size_t q = 0; q < c.values[i].size(); ++q) {
      os << "value " << i << " " << c.state_names[q] << " = " << c.values[i][q].poly.to_string()
         << "\n";
      if (c.values[i][q].exp) {
        auto& e = *c.values[i][q].exp;
        os << "expvalue " << i << " " << c.state_names[q] << " " << sym_name(e.xvar) << " "
           << e.offset << " " << e.coeff.constant_value() << " " << e.base.constant_value()
           << "\n";
      }
    }
  return os.str();
}

CertificateInstance parse_certificate(std::string_view text, const StateSpace& space) {
  CertificateInstance c;
  bool saw_eps = false, saw_p = false;
  NameResolver vars = [&](const std::string& n, const Token& t) -> Polynomial {
    const StateVar* v = space.find(n);
    if (!v) throw ParseError("unknown state variable '" + n + "'", t.line, t.col);
    return var(v->symbol);
  };
  auto state_index = [&](const std::string& n) {
    for (size_t i = 0; i < c.state_names.size(); ++i)
      if (c.state_names[i] == n) return i;
    throw std::runtime_error("certificate references undeclared automaton state '" + n + "'");
  };

  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    Lexer lex(line);
    if (lex.at_end()) continue;
    std::string key = lex.expect_ident("directive");
    if (key == "state") {
      c.state_names.push_back(lex.expect_ident("state name"));
    } else if (key == "p") {
      c.bound_p = lex.expect_number("bound");
      saw_p = true;
    } else if (key == "epsilon") {
      c.eps = lex.expect_number("epsilon");
      saw_eps = true;
    } else if (key == "M") {
      c.bigm = lex.expect_number("M");
    } else if (key == "handelman") {
      Rat d = lex.expect_number("degree");
      c.handelman_degree = static_cast<unsigned>(d.num().get_ui());
    } else if (key == "kappa") {
      std::string name = lex.expect_ident("parameter name");
      c.kappa[name] = lex.expect_number("value");
    } else if (key == "invariant") {
      size_t q = state_index(lex.expect_ident("state name"));
      if (c.invariant.size() < c.state_names.size()) c.invariant.resize(c.state_names.size());
      std::string kind = lex.expect_ident("region kind");
      if (kind == "full") {
        c.invariant[q].kind = RegionKind::Full;
      } else if (kind == "empty") {
        c.invariant[q].kind = RegionKind::Empty;
      } else if (kind == "box") {
        c.invariant[q].kind = RegionKind::Box;
        while (lex.peek().kind == Token::Kind::Ident) {
          Token t = lex.peek();
          std::string vn = lex.expect_ident("variable");
          const StateVar* v = space.find(vn);
          if (!v) throw ParseError("unknown variable '" + vn + "'", t.line, t.col);
          auto bound = [&]() -> RegionBound {
            if (lex.try_ident("inf")) return std::nullopt;
            if (lex.peek().kind == Token::Kind::Punct && lex.peek().text == "-" &&
                lex.peek(1).kind == Token::Kind::Ident && lex.peek(1).text == "inf") {
              lex.next();
              lex.next();
              return std::nullopt;
            }
            return Polynomial(lex.expect_number("bound"));
          };
          RegionBound lo = bound(), hi = bound();
          if (lo && hi && hi->constant_value() < lo->constant_value())
            throw std::runtime_error("inverted invariant box in certificate");
          c.invariant[q].box[v->symbol] = {lo, hi};
        }
      } else {
        throw std::runtime_error("invariant kind must be full, empty or box");
      }
    } else if (key == "value") {
      size_t i = static_cast<size_t>(lex.expect_number("index").num().get_ui());
      size_t q = state_index(lex.expect_ident("state name"));
      lex.expect_punct("=");
      if (c.values.size() <= i) c.values.resize(i + 1);
      if (c.values[i].size() < c.state_names.size()) c.values[i].resize(c.state_names.size());
      c.values[i][q].poly = parse_expression(lex, vars);
    } else if (key == "expvalue") {
      size_t i = static_cast<size_t>(lex.expect_number("index").num().get_ui());
      size_t q = state_index(lex.expect_ident("state name"));
      Token t = lex.peek();
      std::string vn = lex.expect_ident("variable");
      const StateVar* v = space.find(vn);
      if (!v) throw ParseError("unknown variable '" + vn + "'", t.line, t.col);
      ExpAtom e;
      e.xvar = v->symbol;
      e.offset = lex.expect_number("offset");
      e.coeff = Polynomial(lex.expect_number("coefficient"));
      e.base = Polynomial(lex.expect_number("base"));
      if (e.base.constant_value() <= Rat(0) || e.base.constant_value() >= Rat(1))
        throw std::runtime_error("exponential base must lie in (0,1)");
      if (!e.offset.is_integer()) throw std::runtime_error("exponential offset must be integer");
      if (c.values.size() <= i) c.values.resize(i + 1);
      if (c.values[i].size() < c.state_names.size()) c.values[i].resize(c.state_names.size());
      c.values[i][q].exp = std::move(e);
    } else {
      throw std::runtime_error("certificate line " + std::to_string(lineno) +
                               ": unknown directive '" + key + "'");
    }
  }
  if (c.state_names.empty()) throw std::runtime_error("certificate declares no states");
  if (!saw_eps) throw std::runtime_error("certificate is missing epsilon");
  if (!saw_p) throw std::runtime_error("certificate is missing the bound p");
  if (c.invariant.size() < c.state_names.size()) c.invariant.resize(c.state_names.size());
  for (auto& vi : c.values) vi.resize(c.state_names.size());
  return c;
}

}  // namespace qsc
