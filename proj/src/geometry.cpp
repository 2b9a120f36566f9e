// SPDX-License-Identifier: Apache-2.0
#include "qsc/geometry.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace qsc {

std::set<Symbol> Polyhedron::variables() const {
  std::set<Symbol> out;
  for (auto& c : cs)
    for (auto s : c.expr.variables()) out.insert(s);
  return out;
}

std::string Polyhedron::to_string() const {
  if (cs.empty()) return "true";
  std::string out;
  for (auto& c : cs) {
    if (!out.empty()) out += " and ";
    out += c.to_string();
  }
  return out;
}

LinearConstraint negate_constraint(const LinearConstraint& c, const std::set<Symbol>& int_vars) {
  // not(e >= 0)  <=>  -e > 0 ; not(e > 0)  <=>  -e >= 0
  LinearConstraint out(-c.expr, !c.strict);
  if (!out.strict) return out;
  // Integral tightening: -e > 0 over integer points with integer coefficients
  // becomes -e - 1 >= 0 after clearing denominators.
  bool all_int_vars = true;
  for (auto s : out.expr.variables())
    if (!int_vars.count(s)) all_int_vars = false;
  if (!all_int_vars) return out;
  mpz_class scale = 1;
  for (auto& [m, coeff] : out.expr.terms()) {
    if (!coeff.is_integer()) scale = scale / gcd(scale, coeff.den()) * coeff.den();
  }
  Polynomial scaled = out.expr * Rat(mpz_class(scale));
  for (auto& [m, coeff] : scaled.terms())
    if (!coeff.is_integer()) return out;  // symbolic or non-integral: leave strict
  return LinearConstraint(scaled - Polynomial(Rat(1)), false);
}

namespace {

struct AffineRow {
  std::map<Symbol, Rat> coeff;
  Rat constant;
  bool strict;
};

AffineRow to_row(const LinearConstraint& c) {
  AffineRow r;
  r.strict = c.strict;
  r.constant = Rat(0);
  for (auto& [m, co] : c.expr.terms()) {
    if (m.factors.empty()) {
      r.constant = co;
    } else if (m.factors.size() == 1 && m.factors[0].second == 1) {
      r.coeff[m.factors[0].first] += co;
    } else {
      throw std::invalid_argument("feasibility check on non-affine constraint: " + c.to_string());
    }
  }
  return r;
}

// Fourier-Motzkin feasibility over the rationals.
bool fm_feasible(std::vector<AffineRow> rows) {
  for (;;) {
    // Pick any remaining variable.
    Symbol v = 0;
    bool found = false;
    for (auto& r : rows)
      if (!r.coeff.empty()) {
        v = r.coeff.begin()->first;
        found = true;
        break;
      }
    if (!found) break;
    std::vector<AffineRow> lowers, uppers, rest;
    for (auto& r : rows) {
      auto it = r.coeff.find(v);
      if (it == r.coeff.end() || it->second.is_zero()) {
        AffineRow c = r;
        c.coeff.erase(v);
        rest.push_back(std::move(c));
      } else if (it->second.sign() > 0) {
        lowers.push_back(r);  // a*v + rest >= 0, a > 0 : v >= -(rest)/a
      } else {
        uppers.push_back(r);
      }
    }
    std::vector<AffineRow> next = std::move(rest);
    for (auto& lo : lowers)
      for (auto& up : uppers) {
        Rat a = lo.coeff.at(v), b = up.coeff.at(v);  // a > 0, b < 0
        AffineRow comb;
        comb.strict = lo.strict || up.strict;
        comb.constant = lo.constant * (-b) + up.constant * a;
        for (auto& [s, c] : lo.coeff)
          if (s != v) comb.coeff[s] += c * (-b);
        for (auto& [s, c] : up.coeff)
          if (s != v) comb.coeff[s] += c * a;
        for (auto it = comb.coeff.begin(); it != comb.coeff.end();)
          it = it->second.is_zero() ? comb.coeff.erase(it) : std::next(it);
        next.push_back(std::move(comb));
      }
    rows = std::move(next);
  }
  for (auto& r : rows) {
    int s = r.constant.sign();
    if (s < 0 || (s == 0 && r.strict)) return false;
  }
  return true;
}

}  // namespace

bool feasible(const Polyhedron& p) {
  std::vector<AffineRow> rows;
  rows.reserve(p.cs.size());
  for (auto& c : p.cs) rows.push_back(to_row(c));
  return fm_feasible(std::move(rows));
}

VarBounds implied_bounds(const Polyhedron& p, Symbol v) {
  std::vector<AffineRow> rows;
  for (auto& c : p.cs) rows.push_back(to_row(c));
  // Eliminate everything except v.
  for (;;) {
    Symbol u = 0;
    bool found = false;
    for (auto& r : rows)
      for (auto& [s, c] : r.coeff)
        if (s != v && !found) {
          u = s;
          found = true;
        }
    if (!found) break;
    std::vector<AffineRow> lowers, uppers, rest;
    for (auto& r : rows) {
      auto it = r.coeff.find(u);
      if (it == r.coeff.end() || it->second.is_zero()) {
        AffineRow c = r;
        c.coeff.erase(u);
        rest.push_back(std::move(c));
      } else if (it->second.sign() > 0) {
        lowers.push_back(r);
      } else {
        uppers.push_back(r);
      }
    }
    std::vector<AffineRow> next = std::move(rest);
    for (auto& lo : lowers)
      for (auto& up : uppers) {
        Rat a = lo.coeff.at(u), b = up.coeff.at(u);
        AffineRow comb;
        comb.strict = lo.strict || up.strict;
        comb.constant = lo.constant * (-b) + up.constant * a;
        for (auto& [s, c] : lo.coeff)
          if (s != u) comb.coeff[s] += c * (-b);
        for (auto& [s, c] : up.coeff)
          if (s != u) comb.coeff[s] += c * a;
        for (auto it = comb.coeff.begin(); it != comb.coeff.end();)
          it = it->second.is_zero() ? comb.coeff.erase(it) : std::next(it);
        next.push_back(std::move(comb));
      }
    rows = std::move(next);
  }
  VarBounds out;
  for (auto& r : rows) {
    auto it = r.coeff.find(v);
    if (it == r.coeff.end() || it->second.is_zero()) continue;
    Rat bound = -r.constant / it->second;
    if (it->second.sign() > 0) {  // v >= bound
      if (!out.lo || bound > *out.lo) out.lo = bound;
    } else {
      if (!out.hi || bound < *out.hi) out.hi = bound;
    }
  }
  return out;
}

std::shared_ptr<const Guard> Guard::mk_true() {
  auto g = std::make_shared<Guard>();
  g->kind = Kind::True;
  return g;
}

std::shared_ptr<const Guard> Guard::mk_atom(LinearConstraint c) {
  auto g = std::make_shared<Guard>();
  g->kind = Kind::Atom;
  g->atom = std::move(c);
  return g;
}

std::shared_ptr<const Guard> Guard::mk_not(std::shared_ptr<const Guard> s) {
  auto g = std::make_shared<Guard>();
  g->kind = Kind::Not;
  g->sub.push_back(std::move(s));
  return g;
}

std::shared_ptr<const Guard> Guard::mk_and(std::vector<std::shared_ptr<const Guard>> gs) {
  if (gs.size() == 1) return gs[0];
  auto g = std::make_shared<Guard>();
  g->kind = Kind::And;
  g->sub = std::move(gs);
  return g;
}

std::shared_ptr<const Guard> Guard::mk_or(std::vector<std::shared_ptr<const Guard>> gs) {
  if (gs.size() == 1) return gs[0];
  auto g = std::make_shared<Guard>();
  g->kind = Kind::Or;
  g->sub = std::move(gs);
  return g;
}

bool Guard::evaluate(const std::map<Symbol, Rat>& point) const {
  switch (kind) {
    case Kind::True:
      return true;
    case Kind::Atom: {
      Rat v = atom.expr.evaluate(point);
      return atom.strict ? v.sign() > 0 : v.sign() >= 0;
    }
    case Kind::Not:
      return !sub[0]->evaluate(point);
    case Kind::And:
      for (auto& s : sub)
        if (!s->evaluate(point)) return false;
      return true;
    case Kind::Or:
      for (auto& s : sub)
        if (s->evaluate(point)) return true;
      return false;
  }
  return false;
}

std::string Guard::to_string() const {
  switch (kind) {
    case Kind::True:
      return "true";
    case Kind::Atom:
      return atom.to_string();
    case Kind::Not:
      return "!(" + sub[0]->to_string() + ")";
    case Kind::And: {
      std::string out;
      for (auto& s : sub) out += (out.empty() ? "(" : " and (") + s->to_string() + ")";
      return out;
    }
    case Kind::Or: {
      std::string out;
      for (auto& s : sub) out += (out.empty() ? "(" : " or (") + s->to_string() + ")";
      return out;
    }
  }
  return "?";
}

namespace {

// Literal-conjunction cells for g (positive=true) within running cell `ctx`.
void cells_rec(const Guard& g, bool positive, const Polyhedron& ctx,
               const std::set<Symbol>& int_vars,
               const std::function<void(const Polyhedron&)>& emit) {
  switch (g.kind) {
    case Guard::Kind::True:
      if (positive) emit(ctx);
      return;  // negative true: empty
    case Guard::Kind::Atom: {
      Polyhedron cell = ctx;
      cell.add(positive ? g.atom : negate_constraint(g.atom, int_vars));
      if (feasible(cell)) emit(cell);
      return;
    }
    case Guard::Kind::Not:
      cells_rec(*g.sub[0], !positive, ctx, int_vars, emit);
      return;
    case Guard::Kind::And:
    case Guard::Kind::Or: {
      bool conj = (g.kind == Guard::Kind::And) == positive;
      if (conj) {
        // Fold children left to right, threading the growing cell.
        std::function<void(size_t, const Polyhedron&)> step = [&](size_t i, const Polyhedron& cur) {
          if (i == g.sub.size()) {
            emit(cur);
            return;
          }
          cells_rec(*g.sub[i], positive, cur, int_vars,
                    [&](const Polyhedron& next) { step(i + 1, next); });
        };
        step(0, ctx);
      } else {
        // Disjoint union: child i and the negations of children < i.
        std::function<void(size_t, const Polyhedron&)> step = [&](size_t i, const Polyhedron& cur) {
          if (i == g.sub.size()) return;
          cells_rec(*g.sub[i], positive, cur, int_vars, emit);
          cells_rec(*g.sub[i], !positive, cur, int_vars,
                    [&](const Polyhedron& rest) { step(i + 1, rest); });
        };
        step(0, ctx);
      }
      return;
    }
  }
}

}  // namespace

std::vector<Polyhedron> guard_cells(const GuardPtr& g, const Polyhedron& context,
                                    const std::set<Symbol>& int_vars) {
  std::vector<Polyhedron> out;
  if (!feasible(context)) return out;
  cells_rec(*g, true, context, int_vars, [&](const Polyhedron& c) { out.push_back(c); });
  return out;
}

std::vector<Polyhedron> first_match_cells(const GuardPtr& g, const std::vector<GuardPtr>& earlier,
                                          const Polyhedron& context,
                                          const std::set<Symbol>& int_vars) {
  std::vector<Polyhedron> current{context};
  if (!feasible(context)) return {};
  for (auto& e : earlier) {
    std::vector<Polyhedron> next;
    for (auto& cell : current)
      cells_rec(*e, false, cell, int_vars, [&](const Polyhedron& c) { next.push_back(c); });
    current = std::move(next);
    if (current.empty()) return {};
  }
  std::vector<Polyhedron> out;
  for (auto& cell : current)
    cells_rec(*g, true, cell, int_vars, [&](const Polyhedron& c) { out.push_back(c); });
  return out;
}

}  // namespace qsc
