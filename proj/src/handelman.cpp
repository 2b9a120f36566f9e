// SPDX-License-Identifier: Apache-2.0
#include "qsc/handelman.hpp"

#include <stdexcept>

namespace qsc {

namespace {

void enumerate(const std::vector<Polynomial>& facets, unsigned size, size_t from,
               const Polynomial& prefix, std::vector<Polynomial>& out) {
  if (size == 0) {
    out.push_back(prefix);
    return;
  }
  for (size_t i = from; i < facets.size(); ++i)
    enumerate(facets, size - 1, i, prefix * facets[i], out);
}

}  // namespace

std::vector<Polynomial> handelman_basis(const std::vector<Polynomial>& facets, unsigned maxdeg) {
  std::vector<Polynomial> out;
  for (unsigned s = 0; s <= maxdeg; ++s) enumerate(facets, s, 0, Polynomial(Rat(1)), out);
  return out;
}

std::vector<Polynomial> handelman_basis(const Polyhedron& region, unsigned maxdeg) {
  if (maxdeg < 1) throw std::invalid_argument("handelman_basis: maxdeg must be >= 1");
  if (!feasible(region))
    throw std::invalid_argument("handelman_basis: empty region (filter vacuous domains upstream)");
  std::vector<Polynomial> facets;
  facets.reserve(region.cs.size());
  for (auto& c : region.cs) facets.push_back(c.expr);
  return handelman_basis(facets, maxdeg);
}

}  // namespace qsc
