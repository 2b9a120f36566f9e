// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "qsc/dsa.hpp"
#include "qsc/model.hpp"

namespace qsc {

/// Refined command of the synchronous product at automaton state q: the
/// intersection of one first-match cell of a label edge with one first-match
/// cell of a model command. The automaton successor is fixed per cell because
/// the cell refines the current state's label.
struct ProductCommand {
  Polyhedron domain;  // includes declared-domain facts
  int q_next = 0;
  std::vector<ProbBranch> branches;
  size_t model_command = 0;  // provenance
};

enum class Mode { Dec, Inc, NonInc };
enum class SinkStatus { SurelyAccepting, SurelyRejecting, Neither };

struct ModeTable {
  // mode[i][q] for pair i and automaton state q
  std::vector<std::vector<Mode>> mode;
  Mode of(size_t pair, int q) const { return mode[pair][q]; }
};

struct ProductModel {
  Model base;
  Dsa automaton;
  std::vector<std::vector<ProductCommand>> commands;  // per automaton state

  int pair_count() const { return static_cast<int>(automaton.pairs.size()); }
  /// One product step: automaton reads the current label, then the model moves.
  std::pair<std::map<Symbol, Rat>, int> step(const std::map<Symbol, Rat>& state, int q,
                                             const std::map<Symbol, Rat>& kappa,
                                             std::mt19937_64& rng) const;
  /// The refined command that fires at (state, q); throws if none does.
  const ProductCommand& firing(const std::map<Symbol, Rat>& state, int q) const;
};

ProductModel compose(Model m, Dsa a);

/// Dec iff q in F_i \ G_i, Inc iff q in G_i, NonInc otherwise.
ModeTable classify_modes(const ProductModel& p);

/// q is a sink iff all its edges self-loop. A sink is SurelyAccepting iff for
/// every pair, q not in F_i or q in G_i; SurelyRejecting iff q in F_i \ G_i
/// for some pair; Neither otherwise (and for all non-sinks).
std::vector<SinkStatus> analyze_sinks(const ProductModel& p);

}  // namespace qsc
