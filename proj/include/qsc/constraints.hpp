// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "qsc/certificate.hpp"
#include "qsc/handelman.hpp"

namespace qsc {

/// Universally quantified claim `claim >= 0etc on domain`, to be relaxed into
/// existential multiplier conditions. Domains are conjunctions of affine
/// facets over the state variables (plus one `t` variable standing for
/// base^(x - offset) when exponential atoms are involved); facet coefficients
/// may mention invariant-bound unknowns or the exponential base.
struct Implication {
  std::string tag;      // invariant-drift | streett-dec | streett-inc |
                        // streett-noninc | exterior | nonneg | exit-nonneg
  std::string context;  // automaton state / pair / command provenance
  Polyhedron domain;
  Polynomial claim;
  std::set<Symbol> domain_vars;
  // Exponential linkage, when present: t_sym stands for base^(xvar - offset).
  std::optional<Symbol> exp_t;
  Symbol exp_var = 0;
  Rat exp_offset;
  Polynomial exp_base;
};

struct SideConstraint {
  std::string tag;
  Polynomial expr;  // >= 0 (or > 0 when strict)
  bool strict = false;
};

struct ConstraintSystem {
  std::vector<Implication> implications;
  std::vector<SideConstraint> sides;
  // Relaxation output: coefficient equations (== 0) and multiplier symbols.
  std::vector<std::pair<std::string, Polynomial>> equations;
  std::vector<Symbol> lambdas;
  // All non-domain unknowns to declare (template unknowns, control parameters).
  std::vector<Symbol> unknowns;
};

struct SystemOptions {
  std::map<Symbol, std::pair<Rat, Rat>> frame;  // effective working frame
  Rat eps_min{1, 1000};
  Rat m_max{1000000};
  Polynomial target_p;        // probability bound: asserts 1 - p - muV0 >= 0
  bool kappa_unknown = false; // declare control parameters as query unknowns
  unsigned exp_power_cap = 12;
  std::string prefix;         // lambda / t symbol prefix
};

/// Post-expectation of V_i across one refined command: sum over branches of
/// weight(kappa) * V_i(update(x), q_next), exactly expanded. Exponential
/// parts are written through t = base^(x - t_offset); the result is cleared
/// to a polynomial, scaled by base^base_shift (base_shift >= 0).
struct ClearedPoly {
  Polynomial value;
  long base_shift = 0;
};
ClearedPoly post_expectation(const ProductModel& p, const TemplateSet& t, size_t i, int q,
                             const ProductCommand& pc, std::optional<Symbol> t_sym,
                             const Rat& t_offset);

/// V_0 evaluated at the Dirac initial state and initial automaton state;
/// linear in the V_0 coefficients (scaled by base^base_shift when an
/// exponential offset exceeds the initial value).
ClearedPoly init_expectation(const ProductModel& p, const TemplateSet& t);

/// Emits the full quantified system: invariant drift, per-pair Streett drift
/// by mode, exterior condition on frame-minus-invariant pieces, value
/// nonnegativity on the invariant (plus one-step exit pieces), the
/// probability target, and all side constraints (bound ordering, frame
/// containment, control box, weight ranges, margins).
ConstraintSystem generate_system(const ProductModel& p, const TemplateSet& t,
                                 const SystemOptions& opt);

/// Frame-containment side conditions: each update image of I_q must lie in
/// the frame (which contains every invariant piece). Numeric conditions are
/// checked immediately (throws on violation); symbolic ones become side
/// constraints. Exposed separately for direct testing.
std::vector<SideConstraint> check_frame_containment(const ProductModel& p, const TemplateSet& t,
                                                    const std::map<Symbol, std::pair<Rat, Rat>>& frame);

/// Handelman relaxation of one implication: claim == sum lambda_e * basis_e
/// as polynomials in the domain variables; matching coefficients yields
/// equations linear in lambda. Throws when a claim variable is unbounded in
/// the domain. `maxdeg` is raised to the claim degree when necessary.
void relax_implication(const Implication& imp, unsigned maxdeg, const std::string& lambda_prefix,
                       size_t imp_index, ConstraintSystem& out);

/// Relaxes every implication in the system.
void relax_system(ConstraintSystem& sys, unsigned maxdeg, const std::string& lambda_prefix);

}  // namespace qsc
