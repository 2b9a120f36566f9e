// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qsc/polynomial.hpp"

namespace qsc {

/// Affine inequality `expr >= 0` (or `expr > 0` when strict). Coefficients may
/// contain non-domain symbols (template bound unknowns); feasibility tests
/// require fully numeric constraints over the named domain variables.
struct LinearConstraint {
  Polynomial expr;
  bool strict = false;

  LinearConstraint() = default;
  LinearConstraint(Polynomial e, bool s = false) : expr(std::move(e)), strict(s) {}
  std::string to_string() const { return expr.to_string() + (strict ? " > 0" : " >= 0"); }
};

/// Conjunction of affine inequalities.
struct Polyhedron {
  std::vector<LinearConstraint> cs;

  void add(LinearConstraint c) { cs.push_back(std::move(c)); }
  void add_all(const Polyhedron& o) { cs.insert(cs.end(), o.cs.begin(), o.cs.end()); }
  bool trivially_true() const { return cs.empty(); }
  std::set<Symbol> variables() const;
  std::string to_string() const;
};

/// Negation of `c` as a constraint. For integer-valued variables with integer
/// (after scaling) coefficients, strict inequalities are tightened to
/// non-strict ones: not(e >= 0) becomes -e - 1 >= 0.
LinearConstraint negate_constraint(const LinearConstraint& c, const std::set<Symbol>& int_vars);

/// Exact feasibility of a numeric affine system by Fourier-Motzkin
/// elimination, honouring strictness. Throws if a constraint is not affine or
/// not numeric in its coefficients.
bool feasible(const Polyhedron& p);

/// Tightest implied interval for `v` (by FM-eliminating every other
/// variable), or nullopt bounds where unbounded. Numeric systems only.
struct VarBounds {
  std::optional<Rat> lo, hi;
};
VarBounds implied_bounds(const Polyhedron& p, Symbol v);

/// Boolean guard over linear atoms.
struct Guard {
  enum class Kind { True, Atom, Not, And, Or };
  Kind kind = Kind::True;
  LinearConstraint atom;                         // Kind::Atom
  std::vector<std::shared_ptr<const Guard>> sub; // Not (1), And/Or (2+)

  static std::shared_ptr<const Guard> mk_true();
  static std::shared_ptr<const Guard> mk_atom(LinearConstraint c);
  static std::shared_ptr<const Guard> mk_not(std::shared_ptr<const Guard> g);
  static std::shared_ptr<const Guard> mk_and(std::vector<std::shared_ptr<const Guard>> gs);
  static std::shared_ptr<const Guard> mk_or(std::vector<std::shared_ptr<const Guard>> gs);

  bool evaluate(const std::map<Symbol, Rat>& point) const;
  std::string to_string() const;
};

using GuardPtr = std::shared_ptr<const Guard>;

/// DNF cell decomposition of `g` within `context`: returns disjoint convex
/// cells covering context /\ g. Infeasible cells are pruned. `int_vars`
/// enables integral tightening of negated atoms.
std::vector<Polyhedron> guard_cells(const GuardPtr& g, const Polyhedron& context,
                                    const std::set<Symbol>& int_vars);

/// Cells of context /\ g /\ not(g1) /\ ... (first-match remainder).
std::vector<Polyhedron> first_match_cells(const GuardPtr& g,
                                          const std::vector<GuardPtr>& earlier,
                                          const Polyhedron& context,
                                          const std::set<Symbol>& int_vars);

}  // namespace qsc
