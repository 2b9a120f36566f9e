// SPDX-License-Identifier: Apache-2.0
#include "qsc/constraints.hpp"

#include <algorithm>
#include <stdexcept>

namespace qsc {

namespace {

/// Finite sum of base^k * poly terms with integer (possibly negative) k.
/// Constant bases are folded immediately; symbolic bases are cleared at the
/// end by multiplying with base^{-min k}.
struct LaurentA {
  std::map<long, Polynomial> parts;

  void add(long power, const Polynomial& p, const Polynomial& base) {
    if (p.is_zero()) return;
    if (base.is_constant()) {
      parts[0] += p * base.constant_value().pow(power);
    } else {
      parts[power] += p;
    }
  }

  void add(const LaurentA& o) {
    for (auto& [k, p] : o.parts) parts[k] += p;
  }

  void scale(const Polynomial& w) {
    for (auto& [k, p] : parts) p *= w;
  }

  bool is_zero() const {
    for (auto& [k, p] : parts)
      if (!p.is_zero()) return false;
    return true;
  }

  ClearedPoly cleared(const Polynomial& base) const {
    ClearedPoly out;
    long min_k = 0;
    for (auto& [k, p] : parts)
      if (!p.is_zero()) min_k = std::min(min_k, k);
    out.base_shift = -min_k;
    for (auto& [k, p] : parts) {
      if (p.is_zero()) continue;
      out.value += p * base.pow(static_cast<unsigned>(k - min_k));
    }
    return out;
  }
};

/// Value of piece (i, q) at the current state, through t = base^(x - t_offset).
LaurentA piece_value(const TemplateSet& t, size_t i, int q, std::optional<Symbol> t_sym,
                     const Rat& t_offset) {
  LaurentA out;
  const PieceFun& piece = t.values[i][q];
  out.parts[0] += piece.poly;
  if (piece.exp) {
    if (!t_sym) throw std::logic_error("exponential piece without a t variable");
    // coeff * base^(x - o_q) = coeff * t * base^(t_offset - o_q)
    Rat diff = t_offset - piece.exp->offset;
    if (!diff.is_integer()) throw std::runtime_error("exponential offsets must differ by integers");
    out.add(diff.num().get_si(), piece.exp->coeff * var(*t_sym), piece.exp->base);
  }
  return out;
}

/// Value of piece (i, q_next) after applying one branch update.
LaurentA branch_value(const TemplateSet& t, size_t i, int q_next, const ProbBranch& b,
                      std::optional<Symbol> t_sym, const Rat& t_offset) {
  LaurentA out;
  const PieceFun& piece = t.values[i][q_next];
  std::map<Symbol, Polynomial> binding;
  for (auto& [v, upd] : b.updates) binding[v] = upd;
  out.parts[0] += piece.poly.substitute(binding);
  if (piece.exp) {
    if (!t_sym) throw std::logic_error("exponential piece without a t variable");
    Polynomial delta = b.update_of(piece.exp->xvar) - var(piece.exp->xvar);
    if (!delta.is_constant() || !delta.constant_value().is_integer())
      throw std::runtime_error(
          "exponential atom with a non-integer-shift update is unsupported");
    // coeff * base^(x + delta - o_next) = coeff * t * base^(delta + t_offset - o_next)
    Rat power = delta.constant_value() + t_offset - piece.exp->offset;
    if (!power.is_integer()) throw std::runtime_error("exponential offsets must differ by integers");
    out.add(power.num().get_si(), piece.exp->coeff * var(*t_sym), piece.exp->base);
  }
  return out;
}

LaurentA post_expectation_laurent(const TemplateSet& t, size_t i, const ProductCommand& pc,
                                  std::optional<Symbol> t_sym, const Rat& t_offset) {
  LaurentA out;
  for (auto& b : pc.branches) {
    LaurentA v = branch_value(t, i, pc.q_next, b, t_sym, t_offset);
    v.scale(b.weight);
    out.add(v);
  }
  return out;
}

Polynomial exp_base_or_one(const TemplateSet& t) {
  for (auto& vi : t.values)
    for (auto& piece : vi)
      if (piece.exp) return piece.exp->base;
  return Polynomial(Rat(1));
}

}  // namespace

ClearedPoly post_expectation(const ProductModel&, const TemplateSet& t, size_t i, int q,
                             const ProductCommand& pc, std::optional<Symbol> t_sym,
                             const Rat& t_offset) {
  (void)q;
  return post_expectation_laurent(t, i, pc, t_sym, t_offset).cleared(exp_base_or_one(t));
}

ClearedPoly init_expectation(const ProductModel& p, const TemplateSet& t) {
  int q0 = p.automaton.initial;
  const PieceFun& piece = t.values[0][q0];
  LaurentA out;
  out.parts[0] += piece.poly.substitute_values(p.base.initial);
  if (piece.exp) {
    Rat power = p.base.initial.at(piece.exp->xvar) - piece.exp->offset;
    if (!power.is_integer())
      throw std::runtime_error("initial state is not integral for the exponential atom");
    out.add(power.num().get_si(), piece.exp->coeff, piece.exp->base);
  }
  return out.cleared(exp_base_or_one(t));
}

namespace {

struct Generator {
  const ProductModel& p;
  const TemplateSet& t;
  const SystemOptions& opt;
  ConstraintSystem sys;
  ModeTable modes;
  std::set<Symbol> state_syms;
  std::set<Symbol> int_vars;
  Polynomial base;
  bool base_symbolic = false;
  size_t t_counter = 0;

  Generator(const ProductModel& p, const TemplateSet& t, const SystemOptions& opt)
      : p(p), t(t), opt(opt) {
    modes = classify_modes(p);
    state_syms = p.base.space.symbols();
    int_vars = p.base.space.integer_symbols();
    base = exp_base_or_one(t);
    base_symbolic = !base.is_constant();
  }

  bool piece_has_exp(size_t i, int q) const { return t.values[i][q].exp.has_value(); }

  bool command_involves_exp(size_t i, int q, const ProductCommand& pc) const {
    return piece_has_exp(i, q) || piece_has_exp(i, pc.q_next);
  }

  /// Numeric per-variable bounds of a domain: implied by its numeric facets.
  VarBounds numeric_bounds(const Polyhedron& dom, Symbol v) const {
    Polyhedron numeric;
    for (auto& c : dom.cs) {
      bool ok = true;
      for (auto s : c.expr.variables())
        if (!state_syms.count(s)) ok = false;
      if (ok) numeric.add(c);
    }
    return implied_bounds(numeric, v);
  }

  /// Adds t-variable facets for t = base^(x - offset) over the domain's
  /// x-range. Symbolic bases cap the exponent (sound weakening); constant
  /// bases use exact rational powers.
  void add_t_facets(Polyhedron& dom, Symbol t_sym, Symbol xvar, const Rat& offset) {
    VarBounds xb = numeric_bounds(dom, xvar);
    Polynomial tv = var(t_sym);
    bool have_lower = false;
    auto power_of = [&](long e) { return base.pow(static_cast<unsigned>(e)); };
    if (xb.lo && xb.lo->is_integer()) {
      long e = Rat(*xb.lo - offset).num().get_si();
      if (!base_symbolic) {
        dom.add(LinearConstraint(Polynomial(base.constant_value().pow(e)) - tv));
      } else if (e >= 0) {
        long ee = std::min<long>(e, opt.exp_power_cap);
        dom.add(LinearConstraint(power_of(ee) - tv));
      } else if (-e <= static_cast<long>(opt.exp_power_cap)) {
        // t <= base^e  <=>  t * base^{-e} <= 1
        dom.add(LinearConstraint(Polynomial(Rat(1)) - tv * power_of(-e)));
      }
    } else if (base_symbolic) {
      // Domain variables are nonnegative on all shipped models when the
      // offset is 0; otherwise no upper bound is available.
      if (offset <= Rat(0) && xb.lo && *xb.lo >= offset) {
        dom.add(LinearConstraint(Polynomial(Rat(1)) - tv));
      }
    }
    if (xb.hi && xb.hi->is_integer()) {
      long e = Rat(*xb.hi - offset).num().get_si();
      if (!base_symbolic) {
        dom.add(LinearConstraint(tv - Polynomial(base.constant_value().pow(e))));
        have_lower = true;
      } else if (e >= 0 && e <= static_cast<long>(opt.exp_power_cap)) {
        dom.add(LinearConstraint(tv - power_of(e)));
        have_lower = true;
      } else if (e < 0 && -e <= static_cast<long>(opt.exp_power_cap)) {
        dom.add(LinearConstraint(tv * power_of(-e) - Polynomial(Rat(1))));
        have_lower = true;
      }
    }
    if (!have_lower) dom.add(LinearConstraint(tv));  // t >= 0
  }

  /// Facets of the invariant piece at q (Box only), over the state variables.
  Polyhedron invariant_facets(int q) const {
    Polyhedron out;
    const RegionPiece& r = t.invariant[q];
    if (r.kind == RegionKind::Box) {
      for (auto& [v, b] : r.box) {
        if (b.first) out.add(LinearConstraint(var(v) - *b.first));
        if (b.second) out.add(LinearConstraint(*b.second - var(v)));
      }
    }
    return out;
  }

  /// Piece list of `outer \ inner-box` where outer maps each variable to
  /// closed bounds (polynomials). Integral tightening on integer variables;
  /// closed (conservative) pieces on real variables. Pieces that are
  /// provably empty by constant-difference are pruned.
  std::vector<Polyhedron> subtract_region(
      const std::map<Symbol, std::pair<RegionBound, RegionBound>>& outer,
      const RegionPiece& inner) {
    std::vector<Polyhedron> out;
    auto outer_poly = [&]() {
      Polyhedron ph;
      for (auto& [v, b] : outer) {
        if (b.first) ph.add(LinearConstraint(var(v) - *b.first));
        if (b.second) ph.add(LinearConstraint(*b.second - var(v)));
      }
      return ph;
    };
    if (inner.kind == RegionKind::Full) return out;
    if (inner.kind == RegionKind::Empty) {
      out.push_back(outer_poly());
      return out;
    }
    auto maybe_push = [&](Polyhedron ph) {
      // Prune pieces whose interval is a provably negative constant width.
      for (auto& [v, b] : outer)
        if (piece_known_empty(ph, v)) return;
      out.push_back(std::move(ph));
    };
    size_t idx = 0;
    for (auto& [v, inner_b] : inner.box) {
      // Below inner.lo and above inner.hi in coordinate v; earlier
      // coordinates confined inside the inner box.
      bool integer = int_vars.count(v) > 0;
      for (int side = 0; side < 2; ++side) {
        Polyhedron ph = outer_poly();
        size_t j = 0;
        for (auto& [w, wb] : inner.box) {
          if (j >= idx) break;
          if (wb.first) ph.add(LinearConstraint(var(w) - *wb.first));
          if (wb.second) ph.add(LinearConstraint(*wb.second - var(w)));
          ++j;
        }
        // Exact integral tightening for concrete bounds; symbolic bounds keep
        // the conservative closed piece (V_0 >= 1 on the boundary itself).
        // Unbounded inner sides have no piece at all.
        if (side == 0) {
          if (!inner_b.first) continue;
          if (integer && inner_b.first->is_constant()) {
            Rat lo = inner_b.first->constant_value();
            mpz_class g = lo.is_integer() ? mpz_class(lo.num() - 1) : lo.floor();
            ph.add(LinearConstraint(Polynomial(Rat(g)) - var(v), false));
          } else {
            ph.add(LinearConstraint(*inner_b.first - var(v), false));
          }
        } else {
          if (!inner_b.second) continue;
          if (integer && inner_b.second->is_constant()) {
            Rat hi = inner_b.second->constant_value();
            mpz_class g = hi.is_integer() ? mpz_class(hi.num() + 1) : hi.ceil();
            ph.add(LinearConstraint(var(v) - Polynomial(Rat(g)), false));
          } else {
            ph.add(LinearConstraint(var(v) - *inner_b.second, false));
          }
        }
        maybe_push(std::move(ph));
      }
      ++idx;
    }
    return out;
  }

  /// Constant-difference emptiness: upper - lower constant and negative.
  bool piece_known_empty(const Polyhedron& ph, Symbol v) const {
    // Collect univariate bound expressions lo <= x <= hi with polynomial
    // bounds; if some pair differs by a negative constant, the piece is empty.
    std::vector<Polynomial> lowers, uppers;
    for (auto& c : ph.cs) {
      Rat k = c.expr.linear_coeff(v);
      if (k.is_zero()) continue;
      Polynomial rest = c.expr - Polynomial::term(k, Monomial{{{v, 1}}});
      bool rest_has_v = rest.uses(v);
      if (rest_has_v) continue;
      if (k.sign() > 0)
        lowers.push_back(rest * (Rat(-1) / k));  // x >= -rest/k
      else
        uppers.push_back(rest * (Rat(-1) / k));  // x <= ...
    }
    for (auto& lo : lowers)
      for (auto& up : uppers) {
        Polynomial width = up - lo;
        if (width.is_constant() && width.constant_value().sign() < 0) return true;
      }
    return false;
  }

  void push_implication(const std::string& tag, const std::string& ctx, Polyhedron dom,
                        const Polynomial& claim, std::optional<Symbol> t_sym, Symbol exp_var = 0,
                        Rat exp_offset = Rat(0)) {
    if (claim.is_zero()) return;
    if (claim.is_constant()) {
      if (claim.constant_value().sign() >= 0) return;
      sys.sides.push_back({tag + " (infeasible constant claim at " + ctx + ")", claim, false});
      return;
    }
    Implication imp;
    imp.tag = tag;
    imp.context = ctx;
    imp.domain = std::move(dom);
    imp.claim = claim;
    imp.domain_vars = state_syms;
    if (t_sym) {
      imp.domain_vars.insert(*t_sym);
      imp.exp_t = t_sym;
      imp.exp_var = exp_var;
      imp.exp_offset = exp_offset;
      imp.exp_base = base;
    }
    // Prune implications with numerically infeasible domains.
    Polyhedron numeric;
    bool all_numeric = true;
    for (auto& c : imp.domain.cs) {
      bool ok = true;
      for (auto s : c.expr.variables())
        if (!imp.domain_vars.count(s)) ok = false;
      if (ok)
        numeric.add(c);
      else
        all_numeric = false;
    }
    if (!feasible(numeric)) return;
    (void)all_numeric;
    sys.implications.push_back(std::move(imp));
  }

  std::optional<Symbol> fresh_t(size_t i, int q, size_t cmd) {
    Symbol s = sym(opt.prefix + "t" + std::to_string(t_counter++));
    (void)i;
    (void)q;
    (void)cmd;
    return s;
  }

  void drift_claims() {
    for (int q = 0; q < p.automaton.state_count(); ++q) {
      if (t.invariant[q].kind == RegionKind::Empty) continue;
      const std::string& qn = p.automaton.state_names[q];
      for (size_t ci = 0; ci < p.commands[q].size(); ++ci) {
        const ProductCommand& pc = p.commands[q][ci];
        std::string ctx = qn + " command#" + std::to_string(ci + 1) + " -> " +
                          p.automaton.state_names[pc.q_next];
        for (size_t i = 0; i < t.values.size(); ++i) {
          bool has_exp = command_involves_exp(i, q, pc);
          std::optional<Symbol> t_sym;
          Rat t_offset(0);
          Polyhedron dom = pc.domain;
          dom.add_all(invariant_facets(q));
          if (has_exp) {
            const auto& piece = t.values[i][q].exp ? t.values[i][q].exp : t.values[i][pc.q_next].exp;
            t_offset = piece->offset;
            t_sym = fresh_t(i, q, ci);
            add_t_facets(dom, *t_sym, piece->xvar, t_offset);
          }
          LaurentA cur = piece_value(t, i, q, t_sym, t_offset);
          LaurentA post = post_expectation_laurent(t, i, pc, t_sym, t_offset);
          LaurentA diff = cur;
          for (auto& [k, poly] : post.parts) diff.parts[k] -= poly;
          std::string tag;
          if (i == 0) {
            tag = "invariant-drift";
          } else {
            switch (modes.of(i - 1, q)) {
              case Mode::Dec:
                tag = "streett-dec";
                diff.parts[0] -= t.eps;
                break;
              case Mode::Inc:
                tag = "streett-inc";
                diff.parts[0] += t.bigm;
                break;
              case Mode::NonInc:
                tag = "streett-noninc";
                break;
            }
            tag += " pair " + std::to_string(i);
          }
          Symbol exp_var = 0;
          if (has_exp) {
            const auto& piece =
                t.values[i][q].exp ? t.values[i][q].exp : t.values[i][pc.q_next].exp;
            exp_var = piece->xvar;
          }
          push_implication(tag, ctx, dom, diff.cleared(base).value, t_sym, exp_var, t_offset);
          if (i >= 1) exit_nonneg_claims(i, q, pc, ctx);
        }
      }
    }
  }

  /// Nonnegativity of V_i (i >= 1) on the one-step image of the drift domain
  /// outside the successor invariant piece: exit values feed P V_i, so they
  /// must not be negative.
  void exit_nonneg_claims(size_t i, int q, const ProductCommand& pc, const std::string& ctx) {
    const RegionPiece& target = t.invariant[pc.q_next];
    if (target.kind == RegionKind::Full) return;
    for (size_t bi = 0; bi < pc.branches.size(); ++bi) {
      auto image = branch_image(q, pc, pc.branches[bi]);
      if (!image) {
        // Non-affine update: conservative fallback to frame \ invariant.
        image.emplace();
        for (auto& [v, b] : opt.frame)
          (*image)[v] = {RegionBound(Polynomial(b.first)), RegionBound(Polynomial(b.second))};
        if (image->empty())
          throw std::runtime_error(
              "exit nonnegativity with a non-affine update needs a declared frame");
      }
      for (auto& piece : subtract_region(*image, target)) {
        Polyhedron dom = piece;
        // Clip by declared domains: states outside them do not exist.
        dom.add_all(p.base.space.domain_facts());
        push_implication("exit-nonneg pair " + std::to_string(i),
                         ctx + " branch#" + std::to_string(bi + 1) + " into " +
                             p.automaton.state_names[pc.q_next],
                         dom, t.values[i][pc.q_next].poly, std::nullopt);
      }
    }
  }

  /// Interval image of the drift domain (invariant box meet command cell)
  /// under an affine branch update, per variable, with half-line sides;
  /// nullopt for non-affine updates.
  std::optional<std::map<Symbol, std::pair<RegionBound, RegionBound>>> branch_image(
      int q, const ProductCommand& pc, const ProbBranch& b) {
    std::map<Symbol, std::pair<RegionBound, RegionBound>> bounds;
    Polyhedron dom = pc.domain;
    dom.add_all(invariant_facets(q));
    for (auto& v : p.base.space.variables) {
      VarBounds nb = numeric_bounds(dom, v.symbol);
      RegionBound lo, hi;
      if (nb.lo) lo = Polynomial(*nb.lo);
      if (nb.hi) hi = Polynomial(*nb.hi);
      if (t.invariant[q].kind == RegionKind::Box) {
        auto it = t.invariant[q].box.find(v.symbol);
        if (it != t.invariant[q].box.end()) {
          if (!lo) lo = it->second.first;
          if (!hi) hi = it->second.second;
        }
      }
      bounds[v.symbol] = {lo, hi};
    }
    std::map<Symbol, std::pair<RegionBound, RegionBound>> image;
    for (auto& v : p.base.space.variables) {
      Polynomial upd = b.update_of(v.symbol);
      if (upd.total_degree() > 1) return std::nullopt;
      RegionBound lo = Polynomial(Rat(0)), hi = Polynomial(Rat(0));
      for (auto& [m, c] : upd.terms()) {
        if (m.factors.empty()) {
          if (lo) lo = *lo + Polynomial(c);
          if (hi) hi = *hi + Polynomial(c);
        } else {
          Symbol w = m.factors[0].first;
          const auto& wb = bounds.at(w);
          const RegionBound& contrib_lo = c.sign() > 0 ? wb.first : wb.second;
          const RegionBound& contrib_hi = c.sign() > 0 ? wb.second : wb.first;
          lo = (lo && contrib_lo) ? RegionBound(*lo + *contrib_lo * c) : std::nullopt;
          hi = (hi && contrib_hi) ? RegionBound(*hi + *contrib_hi * c) : std::nullopt;
        }
      }
      image[v.symbol] = {lo, hi};
    }
    return image;
  }

  void exterior_claims() {
    std::map<Symbol, std::pair<RegionBound, RegionBound>> frame_box;
    for (auto& [v, b] : opt.frame)
      frame_box[v] = {RegionBound(Polynomial(b.first)), RegionBound(Polynomial(b.second))};
    for (int q = 0; q < p.automaton.state_count(); ++q) {
      const RegionPiece& r = t.invariant[q];
      if (r.kind == RegionKind::Full) continue;
      if (r.kind != RegionKind::Empty && frame_box.empty())
        throw std::runtime_error(
            "a bounded frame is required for the exterior condition; declare `frame x in "
            "[a, b];` in the model or set one in the configuration");
      const std::string& qn = p.automaton.state_names[q];
      size_t piece_no = 0;
      for (auto& piece : subtract_region(frame_box, r)) {
        Polyhedron dom = piece;
        dom.add_all(p.base.space.domain_facts());
        std::optional<Symbol> t_sym;
        Polynomial claim;
        if (piece_has_exp(0, q)) {
          t_sym = fresh_t(0, q, 90000 + piece_no);
          const auto& e = *t.values[0][q].exp;
          add_t_facets(dom, *t_sym, e.xvar, e.offset);
          LaurentA v = piece_value(t, 0, q, t_sym, e.offset);
          v.parts[0] -= Polynomial(Rat(1));
          claim = v.cleared(base).value;
        } else {
          claim = t.values[0][q].poly - Polynomial(Rat(1));
        }
        Symbol exp_var = piece_has_exp(0, q) ? t.values[0][q].exp->xvar : 0;
        Rat exp_off = piece_has_exp(0, q) ? t.values[0][q].exp->offset : Rat(0);
        push_implication("exterior", qn + " piece#" + std::to_string(++piece_no), dom, claim,
                         t_sym, exp_var, exp_off);
      }
    }
  }

  void nonneg_claims() {
    for (int q = 0; q < p.automaton.state_count(); ++q) {
      const RegionPiece& r = t.invariant[q];
      if (r.kind == RegionKind::Empty) continue;
      const std::string& qn = p.automaton.state_names[q];
      for (size_t i = 0; i < t.values.size(); ++i) {
        Polyhedron dom = p.base.space.domain_facts();
        dom.add_all(invariant_facets(q));
        std::optional<Symbol> t_sym;
        Polynomial claim;
        if (piece_has_exp(i, q)) {
          const auto& e = *t.values[i][q].exp;
          t_sym = fresh_t(i, q, 80000);
          add_t_facets(dom, *t_sym, e.xvar, e.offset);
          claim = piece_value(t, i, q, t_sym, e.offset).cleared(base).value;
        } else {
          claim = t.values[i][q].poly;
        }
        Symbol exp_var = piece_has_exp(i, q) ? t.values[i][q].exp->xvar : 0;
        Rat exp_off = piece_has_exp(i, q) ? t.values[i][q].exp->offset : Rat(0);
        push_implication("nonneg V" + std::to_string(i), qn, dom, claim, t_sym, exp_var, exp_off);
      }
    }
  }

  void target_claim() {
    ClearedPoly mu = init_expectation(p, t);
    // 1 - p - muV0 >= 0, scaled by base^shift when the init expectation was.
    Polynomial one_minus_p = Polynomial(Rat(1)) - opt.target_p;
    Polynomial lhs =
        one_minus_p * base.pow(static_cast<unsigned>(mu.base_shift)) - mu.value;
    sys.sides.push_back({"target", lhs, false});
  }

  void side_constraints() {
    sys.sides.push_back({"eps-lower", t.eps - Polynomial(opt.eps_min), false});
    sys.sides.push_back({"bigm-lower", t.bigm - Polynomial(opt.eps_min), false});
    sys.sides.push_back({"bigm-upper", Polynomial(opt.m_max) - t.bigm, false});
    if (t.exp_base) {
      sys.sides.push_back({"base-lower", var(*t.exp_base) - Polynomial(Rat(1, 1024)), false});
      sys.sides.push_back(
          {"base-upper", Polynomial(Rat(1023, 1024)) - var(*t.exp_base), false});
      for (auto& piece : t.values[0])
        if (piece.exp && !piece.exp->coeff.is_constant())
          sys.sides.push_back({"exp-coeff-nonneg", piece.exp->coeff, false});
    }
    if (opt.kappa_unknown) {
      for (auto& [s, box] : p.base.control_box) {
        sys.sides.push_back({"control-box-lower", var(s) - Polynomial(box.first), false});
        sys.sides.push_back({"control-box-upper", Polynomial(box.second) - var(s), false});
      }
      std::set<std::string> seen;
      for (auto& cmd : p.base.commands)
        for (auto& b : cmd.branches) {
          if (b.weight.is_constant()) continue;
          std::string key = b.weight.to_string();
          if (!seen.insert(key).second) continue;
          sys.sides.push_back({"weight-lower", b.weight, false});
          sys.sides.push_back({"weight-upper", Polynomial(Rat(1)) - b.weight, false});
        }
    }
    // Box ordering for invariant bounds (finite sides only).
    for (int q = 0; q < p.automaton.state_count(); ++q) {
      const RegionPiece& r = t.invariant[q];
      if (r.kind != RegionKind::Box) continue;
      for (auto& [v, b] : r.box) {
        if (!b.first || !b.second) continue;
        Polynomial e = *b.second - *b.first;
        if (e.is_constant()) {
          if (e.constant_value().sign() < 0)
            throw std::runtime_error("configuration error: inverted invariant box at state " +
                                     p.automaton.state_names[q]);
        } else {
          sys.sides.push_back({"invariant-box-order", e, false});
        }
      }
    }
    for (auto& sc : check_frame_containment(p, t, opt.frame)) sys.sides.push_back(sc);
  }

  ConstraintSystem run() {
    sys.unknowns = t.unknowns;
    if (opt.kappa_unknown)
      for (auto& [s, box] : p.base.control_box) sys.unknowns.push_back(s);
    drift_claims();
    exterior_claims();
    nonneg_claims();
    target_claim();
    side_constraints();
    for (auto s : opt.target_p.variables())
      if (std::find(sys.unknowns.begin(), sys.unknowns.end(), s) == sys.unknowns.end())
        sys.unknowns.push_back(s);
    return std::move(sys);
  }
};

}  // namespace

std::vector<SideConstraint> check_frame_containment(
    const ProductModel& p, const TemplateSet& t,
    const std::map<Symbol, std::pair<Rat, Rat>>& frame) {
  std::vector<SideConstraint> out;
  SystemOptions opt;
  opt.frame = frame;
  Generator g(p, t, opt);
  for (int q = 0; q < p.automaton.state_count(); ++q) {
    if (t.invariant[q].kind == RegionKind::Empty) continue;
    for (auto& pc : p.commands[q]) {
      const RegionPiece& target = t.invariant[pc.q_next];
      if (target.kind == RegionKind::Full) continue;  // no exterior at the successor
      for (auto& b : pc.branches) {
        auto image = g.branch_image(q, pc, b);
        if (!image) {
          // Nonlinear update: fall back to requiring compact declared domains.
          for (auto& v : p.base.space.variables)
            if (!v.lo || !v.hi)
              throw std::runtime_error(
                  "frame containment: non-affine update needs a compact declared domain for '" +
                  v.name + "'");
          continue;
        }
        for (auto& [v, bounds] : *image) {
          auto fit = frame.find(v);
          RegionBound target_lo, target_hi;
          if (target.kind == RegionKind::Box) {
            auto it = target.box.find(v);
            if (it != target.box.end()) {
              target_lo = it->second.first;
              target_hi = it->second.second;
            }
          }
          auto push_or_check = [&](const Polynomial& e) {
            if (e.is_constant()) {
              if (e.constant_value().sign() < 0)
                throw std::runtime_error(
                    "frame containment fails: one-step image of the invariant leaves the frame "
                    "in variable '" +
                    sym_name(v) + "' (margin " + e.to_string() + ")");
            } else {
              out.push_back({"frame-containment", e, false});
            }
          };
          // Exits below/above the successor piece must land inside the frame;
          // an unbounded image side is fine only when the successor piece is
          // unbounded on that side (then no exit exists there).
          if (bounds.first) {
            if (fit != frame.end()) push_or_check(*bounds.first - Polynomial(fit->second.first));
          } else if (target_lo) {
            throw std::runtime_error(
                "frame containment: image of the invariant is unbounded below in '" +
                sym_name(v) + "' while the successor invariant piece is not");
          }
          if (bounds.second) {
            if (fit != frame.end()) push_or_check(Polynomial(fit->second.second) - *bounds.second);
          } else if (target_hi) {
            throw std::runtime_error(
                "frame containment: image of the invariant is unbounded above in '" +
                sym_name(v) + "' while the successor invariant piece is not");
          }
        }
      }
    }
  }
  return out;
}

ConstraintSystem generate_system(const ProductModel& p, const TemplateSet& t,
                                 const SystemOptions& opt) {
  Generator g(p, t, opt);
  return g.run();
}

void relax_implication(const Implication& imp, unsigned maxdeg, const std::string& lambda_prefix,
                       size_t imp_index, ConstraintSystem& out) {
  // Facets that talk about domain variables relevant to the claim, grown to a
  // fixpoint so that chained multi-variable facets keep their partners.
  std::set<Symbol> needed;
  for (auto s : imp.claim.variables())
    if (imp.domain_vars.count(s)) needed.insert(s);
  std::vector<const LinearConstraint*> kept;
  for (;;) {
    kept.clear();
    std::set<Symbol> grown = needed;
    for (auto& c : imp.domain.cs) {
      std::set<Symbol> dv;
      for (auto s : c.expr.variables())
        if (imp.domain_vars.count(s)) dv.insert(s);
      if (dv.empty()) continue;
      bool touches = false;
      for (auto s : dv)
        if (needed.count(s)) touches = true;
      if (touches) {
        kept.push_back(&c);
        grown.insert(dv.begin(), dv.end());
      }
    }
    if (grown == needed) break;
    needed = std::move(grown);
  }
  // Compactness: every claim variable needs a lower and an upper facet. The
  // coefficient of v inside a facet may be a monomial in known-positive
  // symbols (the exponential base); its sign is the rational factor's sign.
  for (auto v : needed) {
    bool has_lo = false, has_hi = false;
    for (auto* c : kept) {
      auto grouped = c->expr.collect({v});
      for (auto& [mono, coeff] : grouped) {
        if (mono.exponent_of(v) != 1) continue;
        if (coeff.terms().size() != 1) continue;
        int s = coeff.terms().begin()->second.sign();
        if (s > 0) has_lo = true;
        if (s < 0) has_hi = true;
      }
    }
    if (!has_lo || !has_hi)
      throw std::runtime_error("Handelman relaxation needs a compact domain: variable '" +
                               sym_name(v) + "' is unbounded in [" + imp.tag + " " + imp.context +
                               "]");
  }
  std::vector<Polynomial> facets;
  for (auto* c : kept) facets.push_back(c->expr);
  unsigned deg = std::max(maxdeg, imp.claim.degree_in(imp.domain_vars));
  std::vector<Polynomial> basis = handelman_basis(facets, deg);

  Polynomial diff = imp.claim;
  for (size_t e = 0; e < basis.size(); ++e) {
    Symbol lam = sym(lambda_prefix + "l" + std::to_string(imp_index) + "_" + std::to_string(e));
    out.lambdas.push_back(lam);
    diff -= var(lam) * basis[e];
  }
  auto grouped = diff.collect(imp.domain_vars);
  for (auto& [mono, coeff] : grouped)
    out.equations.emplace_back(imp.tag + " " + imp.context + " [" + mono.to_string() + "]", coeff);
}

void relax_system(ConstraintSystem& sys, unsigned maxdeg, const std::string& lambda_prefix) {
  for (size_t i = 0; i < sys.implications.size(); ++i)
    relax_implication(sys.implications[i], maxdeg, lambda_prefix, i, sys);
}

}  // namespace qsc
