// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>

#include "qsc/certificate.hpp"
#include "qsc/constraints.hpp"

namespace qsc {

enum class BoundaryMode { Pessimistic, Optimistic };

/// Exact finite truncation of a product model: all integer product states in
/// a box, plus two absorbing synthetic states for out-of-box transitions.
/// BoundaryAccept sits in every G_i, BoundaryReject in F_1 \ G_1. Transitions
/// leaving the box from a surely-accepting (resp. surely-rejecting) automaton
/// sink are redirected to BoundaryAccept (BoundaryReject) in both modes; the
/// remaining escapes follow the chosen boundary mode.
struct FiniteChain {
  std::vector<std::map<Symbol, Rat>> valuation;  // model component per state
  std::vector<int> autostate;                    // automaton component (-1 synthetic)
  int initial = -1;
  int boundary_accept = -1;
  int boundary_reject = -1;
  std::vector<std::vector<std::pair<int, Rat>>> trans;  // rows sum exactly to 1
  std::vector<Dsa::StreettPair> pairs;                  // over automaton states

  size_t size() const { return trans.size(); }
  bool in_f(size_t pair, int s) const;
  bool in_g(size_t pair, int s) const;
  std::optional<int> index_of(const std::map<Symbol, Rat>& val, int q) const;

private:
  friend FiniteChain truncate(const ProductModel&, const std::map<Symbol, std::pair<long, long>>&,
                              const std::map<std::string, Rat>&, BoundaryMode);
  std::map<std::vector<long>, int> index_;
  std::vector<Symbol> vars_;
};

FiniteChain truncate(const ProductModel& p, const std::map<Symbol, std::pair<long, long>>& box,
                     const std::map<std::string, Rat>& kappa, BoundaryMode mode);

/// Exact acceptance probability from the initial state: BSCC classification
/// (accepting iff every pair has BSCC cap F empty or BSCC cap G nonempty)
/// followed by an exact rational reachability solve.
Rat exact_probability(const FiniteChain& c);

/// Per-state acceptance probabilities (same computation, all states).
std::vector<Rat> state_probabilities(const FiniteChain& c);

/// The exact-invariant construction for finite chains: I = states whose
/// acceptance probability reaches the minimum positive value, i.e. all states
/// with positive probability. Returns the set and P(stay in I forever),
/// which equals exact_probability(c) exactly.
struct ExactInvariant {
  std::vector<bool> members;
  Rat stay_probability;
};
ExactInvariant exact_invariant(const FiniteChain& c);

struct Verdict {
  enum class Status { Valid, Violated, Inconclusive };
  Status status = Status::Inconclusive;
  std::string detail;
  std::map<std::string, Rat> witness;  // variable name -> value (Violated)
  std::vector<std::string> warnings;
};

struct CheckOptions {
  std::map<Symbol, std::pair<Rat, Rat>> frame;
  long grid_cap = 200000;  // max enumerated integer points per implication
  Rat eps_min{1, 1000000};
  Rat m_max{1000000000};
};

/// Independent two-tier certificate check. Tier (a): exact rational LP
/// feasibility of the Handelman multipliers per implication. Tier (b): exact
/// evaluation at every integer point of the domain (up to grid_cap), used
/// when tier (a)'s degree is insufficient (logged warning) and to extract
/// violation witnesses. Integer-kind state spaces make tier (b) exact.
Verdict check_certificate(const CertificateInstance& inst, const ProductModel& p,
                          const CheckOptions& opt);

/// Trace statistics for the satisfaction-probability process.
struct SimulationStats {
  size_t trajectories = 0;
  size_t horizon = 0;
  Rat initial_probability;
  std::vector<double> step_mean;      // empirical mean of P_state(L) per step
  std::vector<double> step_stderr;    // standard error per step
  double max_abs_dev = 0;             // max |mean_n - mean_0|
  double max_dev_sigmas = 0;          // ... in units of that step's stderr
};

/// Simulates `n_traj` seeded product trajectories; when `chain` is given, the
/// per-state exact probabilities from the truncation solve drive the
/// satisfaction-probability process. `csv` (optional) receives columns
/// n, s1..sK (first K <= 10 trajectories) plus the running mean.
SimulationStats simulate(const ProductModel& p, const std::map<std::string, Rat>& kappa,
                         size_t n_traj, size_t horizon, std::uint64_t seed,
                         const FiniteChain* chain, std::ostream* csv);

}  // namespace qsc
