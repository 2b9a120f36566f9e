// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "qsc/product.hpp"

namespace qsc {

/// Exponential atom `coeff * base^(xvar - offset)`; coeff and base are
/// polynomials (an unknown symbol during synthesis, a rational afterwards).
/// Only valid when every update of xvar is an integer shift x <- x + c.
struct ExpAtom {
  Polynomial coeff;
  Polynomial base;
  Symbol xvar = 0;
  Rat offset;  // integer
};

/// One state-indexed piece of a value function: polynomial part plus an
/// optional exponential atom (stochastic invariant V_0 only).
struct PieceFun {
  Polynomial poly;
  std::optional<ExpAtom> exp;
};

enum class RegionKind { Empty, Full, Box };

/// One closed interval side: a constant or eta-symbol bound, or unbounded.
using RegionBound = std::optional<Polynomial>;

struct RegionPiece {
  RegionKind kind = RegionKind::Box;
  // Per state variable closed interval (half-lines allowed).
  std::map<Symbol, std::pair<RegionBound, RegionBound>> box;
};

/// Per-state invariant overrides supplied by configuration.
struct RegionSpec {
  RegionKind kind = RegionKind::Box;
  struct Side {
    bool unbounded = false;            // [a, inf) / (-inf, b]
    std::optional<Rat> value;          // fixed bound; nullopt+!unbounded = unknown
  };
  std::map<Symbol, std::pair<Side, Side>> box;
};

struct TemplateOptions {
  unsigned degree = 2;
  bool exponential = false;       // add an exponential atom to V_0 pieces
  std::string symbol_prefix;      // keeps the phi / not-phi queries disjoint
  std::map<std::string, RegionSpec> invariant_overrides;  // by automaton state name
};

struct TemplateSet {
  // values[i][q] for i = 0..k
  std::vector<std::vector<PieceFun>> values;
  std::vector<RegionPiece> invariant;  // per automaton state
  Polynomial eps, bigm;
  std::optional<Symbol> exp_base;      // shared base unknown, when synthesizing
  std::vector<Symbol> unknowns;        // every declared unknown, creation order
  unsigned degree = 0;

  bool uses(Symbol s) const;
};

/// Builds V_0..V_k templates (k = number of Streett pairs) and the invariant
/// template. States whose invariant piece is Full get polynomial degree 0
/// (claims over unbounded domains must not mention state variables).
/// Throws if the exponential atom is requested and some update is not an
/// integer shift of the single integer variable.
TemplateSet build_templates(const ProductModel& p, const TemplateOptions& opt);

/// SurelyAccepting sinks: V_i fixed to 0 for every i, invariant Full.
/// SurelyRejecting sinks: V_0 fixed to 1, invariant Empty, V_i (i >= 1) free.
void apply_sink_heuristics(TemplateSet& t, const std::vector<SinkStatus>& sinks);

/// Fully rational certificate: independently checkable.
struct CertificateInstance {
  std::vector<std::string> state_names;
  std::vector<std::vector<PieceFun>> values;  // rational coefficients
  std::vector<RegionPiece> invariant;         // rational bounds
  Rat eps{1, 1000};
  Rat bigm{1};
  std::map<std::string, Rat> kappa;  // by parameter name
  Rat bound_p;
  unsigned handelman_degree = 2;
};

/// Substitutes a total assignment into the templates. Throws on unresolved
/// symbols or inverted boxes.
CertificateInstance instantiate(const TemplateSet& t, const ProductModel& p,
                                const std::map<Symbol, Rat>& assignment, const Rat& eps,
                                const Rat& bigm, const std::map<std::string, Rat>& kappa,
                                const Rat& bound_p, unsigned handelman_degree);

/// Line-oriented key/value serialization (also human-readable).
std::string write_certificate(const CertificateInstance& c);
CertificateInstance parse_certificate(std::string_view text, const StateSpace& space);

}  // namespace qsc
