// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "qsc/constraints.hpp"

namespace qsc {

/// SMT-LIB 2 script; byte-deterministic for identical inputs.
struct SmtScript {
  std::string text;
};

std::string rat_to_smt(const Rat& r);
std::string poly_to_smt(const Polynomial& p);

/// Declarations for all unknowns and multipliers (sorted by name), the
/// coefficient equations, lambda nonnegativity, side constraints, check-sat
/// and get-model. Comments carry the constraint provenance tags.
SmtScript emit_smtlib(const ConstraintSystem& sys);

struct SolveResult {
  enum class Status { Sat, Unsat, Unknown };
  Status status = Status::Unknown;
  std::string reason;                  // for Unknown
  std::map<std::string, Rat> model;    // for Sat: name -> exact rational
  std::chrono::milliseconds wall{0};
};

/// Runs the external solver process `argv` on the script (written to a
/// temporary file whose path is appended to argv), with a wall-clock timeout
/// in seconds (0 means immediately Unknown). Irrational model values yield
/// Unknown with reason "irrational model".
SolveResult run_solver(const SmtScript& script, const std::vector<std::string>& argv,
                       double timeout_sec);

/// Retry wrapper: reruns a query whose model came back irrational with every
/// declared unknown constrained to the grid of denominators <= 2^20.
SolveResult run_solver_with_rational_retry(const SmtScript& script,
                                           const ConstraintSystem& sys,
                                           const std::vector<std::string>& argv,
                                           double timeout_sec, std::string* log);

}  // namespace qsc
