// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qsc/geometry.hpp"

namespace qsc {

enum class VarKind { Integer, Real };

struct StateVar {
  std::string name;
  Symbol symbol;
  VarKind kind = VarKind::Integer;
  std::optional<Rat> lo, hi;  // declared domain, used as global facts
};

struct StateSpace {
  std::vector<StateVar> variables;

  const StateVar* find(const std::string& name) const;
  std::set<Symbol> symbols() const;
  std::set<Symbol> integer_symbols() const;
  /// Declared-domain facts as a polyhedron over the state symbols.
  Polyhedron domain_facts() const;
};

/// One probabilistic branch: weight (polynomial over control-parameter
/// symbols only) and per-variable update polynomials over state variables.
struct ProbBranch {
  Polynomial weight;
  std::map<Symbol, Polynomial> updates;  // missing variables keep their value

  Polynomial update_of(Symbol v) const;
};

struct Command {
  GuardPtr guard;
  std::vector<ProbBranch> branches;
};

struct Model {
  StateSpace space;
  std::vector<Command> commands;  // ordered, first-match; last guard is `true`
  std::map<Symbol, Rat> initial;  // Dirac initial state
  std::vector<std::pair<Symbol, std::pair<Rat, Rat>>> control_box;  // closed intervals
  std::optional<std::map<Symbol, std::pair<Rat, Rat>>> frame;       // optional working frame

  std::set<Symbol> control_symbols() const;
  bool has_controls() const { return !control_box.empty(); }
  /// Index of the first command whose guard holds at `state`.
  size_t firing_command(const std::map<Symbol, Rat>& state) const;
};

/// Parses the model DSL. Throws ParseError with line/column diagnostics.
///
///   var x : int in [0, inf);
///   init x = 10;
///   param kappa in [-1/4, 1/4];
///   frame x in [0, 400];            # optional
///   when x <= 0 -> { 1 : x' = x; }
///   when true   -> { 51/100 : x' = x + 1; 49/100 : x' = x - 1; }
Model parse_model(std::string_view text);

/// Structural diagnostics: per-command weights sum identically to 1; affine
/// weights stay within [0,1] on the control box corners; the initial state
/// lies inside declared domains and satisfies some guard. Empty list = valid.
std::vector<std::string> validate_model(const Model& m);

/// One kernel step: first matching command, branch drawn from the weight
/// distribution evaluated at `kappa`, updates applied. Exact sampling: the
/// uniform draw is compared against cumulative rational weights.
std::map<Symbol, Rat> sample_step(const Model& m, const std::map<Symbol, Rat>& state,
                                  const std::map<Symbol, Rat>& kappa, std::mt19937_64& rng);

}  // namespace qsc
