// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "qsc/geometry.hpp"

namespace qsc {

/// All products of the facet polynomials with total multiplicity <= maxdeg,
/// including the empty product 1. "maxdeg" counts product multiplicity, not
/// polynomial degree. Deterministic order: by multiplicity, then lexicographic
/// in the (nondecreasing) facet index multiset.
std::vector<Polynomial> handelman_basis(const std::vector<Polynomial>& facets, unsigned maxdeg);

/// Convenience overload over a polyhedron's facet list. Throws if the region
/// is infeasible (a relaxation over an empty domain is vacuous) or maxdeg < 1.
std::vector<Polynomial> handelman_basis(const Polyhedron& region, unsigned maxdeg);

}  // namespace qsc
