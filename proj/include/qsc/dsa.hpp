// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>
#include <vector>

#include "qsc/ltl.hpp"
#include "qsc/model.hpp"

namespace qsc {

/// Deterministic Streett automaton with predicate-guarded edges. Edges are
/// ordered with first-match semantics; the final edge of every state has
/// guard `true`, which makes the automaton deterministic and total.
struct Dsa {
  struct Edge {
    GuardPtr guard;
    int target = 0;
  };
  struct StreettPair {
    std::set<int> fset;  // visit finitely often ...
    std::set<int> gset;  // ... unless these are visited infinitely often
  };

  std::vector<std::string> state_names;
  int initial = 0;
  std::vector<std::vector<Edge>> edges;  // per state
  std::vector<StreettPair> pairs;
  std::vector<std::string> warnings;  // non-fatal parse findings

  int state_count() const { return static_cast<int>(state_names.size()); }
  int index_of(const std::string& name) const;
  /// Successor under the label of `state` (first matching edge).
  int step(int q, const std::map<Symbol, Rat>& state) const;
  /// Structural checks (totality, pair membership); throws on violation.
  void validate() const;
};

/// Compiles a supported LTL pattern into a DSA. Supported shapes, with a and
/// b propositional: F a, G a, FG a, GF a, GF a -> GF b, GF a and FG b,
/// a U b, a U G b. Throws UnsupportedPattern otherwise (supply a DSA file).
Dsa ltl_to_dsa(const LtlPtr& f);

/// Parses the DSA text format:
///   states q0 q1; initial q0;
///   atom zero : x = 0;
///   from q0: [zero] -> q1; [true] -> q0;
///   from q1: [true] -> q1;
///   pair F = {q0, q1} G = {q1};
/// Guards are Boolean combinations of declared atoms and inline comparisons.
Dsa parse_dsa(std::string_view text, const StateSpace& space);

}  // namespace qsc
