// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "qsc/rational.hpp"

namespace qsc {

/// Exact feasibility of { A x = b, x >= 0 } by phase-1 simplex with Bland's
/// rule (no cycling). Returns a feasible point when one exists.
std::optional<std::vector<Rat>> nonneg_solve(std::vector<std::vector<Rat>> A, std::vector<Rat> b);

}  // namespace qsc
