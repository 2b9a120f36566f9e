// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qsc/model.hpp"

namespace qsc {

/// LTL over atomic predicates on the model's state variables. Atoms carry
/// their predicate as a guard; inline comparisons in formula text become
/// atoms directly.
struct Ltl;
using LtlPtr = std::shared_ptr<const Ltl>;

struct Ltl {
  enum class Op { Atom, Not, And, Or, Imply, Next, Eventually, Always, Until };
  Op op = Op::Atom;
  GuardPtr atom;  // Op::Atom
  std::vector<LtlPtr> sub;

  static LtlPtr mk_atom(GuardPtr g);
  static LtlPtr mk(Op op, std::vector<LtlPtr> sub);

  bool propositional() const;
  std::string to_string() const;
};

/// Parses an LTL formula; standard precedence (unary > U > and > or > ->).
/// Atoms are inline linear comparisons over the model's state variables.
LtlPtr parse_ltl(std::string_view text, const StateSpace& space);

/// Negation pushed inward through the temporal dualities; propositional
/// negation stays at the atoms. not(a U b) = ((!b) U (!a and !b)) or G !b.
LtlPtr negate_ltl(const LtlPtr& f);

struct UnsupportedPattern : std::runtime_error {
  explicit UnsupportedPattern(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qsc
