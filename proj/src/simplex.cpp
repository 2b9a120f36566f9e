// SPDX-License-Identifier: Apache-2.0
#include "qsc/simplex.hpp"

#include <cstddef>

namespace qsc {

std::optional<std::vector<Rat>> nonneg_solve(std::vector<std::vector<Rat>> A, std::vector<Rat> b) {
  const size_t m = A.size();
  const size_t n = m == 0 ? 0 : A[0].size();
  if (m == 0) return std::vector<Rat>(n, Rat(0));

  // Tableau with artificials: columns [x_0..x_{n-1}, a_0..a_{m-1} | rhs].
  for (size_t i = 0; i < m; ++i) {
    if (b[i].sign() < 0) {
      for (auto& v : A[i]) v = -v;
      b[i] = -b[i];
    }
    A[i].resize(n + m, Rat(0));
    A[i][n + i] = Rat(1);
    A[i].push_back(b[i]);
  }
  std::vector<size_t> basis(m);
  for (size_t i = 0; i < m; ++i) basis[i] = n + i;

  // Phase-1 objective: minimise the sum of artificials. Reduced-cost row.
  std::vector<Rat> z(n + m + 1, Rat(0));
  for (size_t j = 0; j <= n + m; ++j) {
    Rat s(0);
    for (size_t i = 0; i < m; ++i) s += A[i][j];
    z[j] = -s;
  }
  for (size_t i = 0; i < m; ++i) z[n + i] = Rat(0);

  for (;;) {
    // Bland: smallest-index entering column with negative reduced cost.
    size_t enter = n + m;
    for (size_t j = 0; j < n + m; ++j)
      if (z[j].sign() < 0) {
        enter = j;
        break;
      }
    if (enter == n + m) break;
    // Ratio test, Bland tie-break by basis variable index.
    size_t leave = m;
    Rat best(0);
    for (size_t i = 0; i < m; ++i) {
      if (A[i][enter].sign() <= 0) continue;
      Rat ratio = A[i].back() / A[i][enter];
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) return std::nullopt;  // unbounded phase-1: cannot happen
    // Pivot.
    Rat piv = A[leave][enter];
    for (auto& v : A[leave]) v /= piv;
    for (size_t i = 0; i < m; ++i) {
      if (i == leave || A[i][enter].is_zero()) continue;
      Rat f = A[i][enter];
      for (size_t j = 0; j <= n + m; ++j) A[i][j] -= f * A[leave][j];
    }
    if (!z[enter].is_zero()) {
      Rat f = z[enter];
      for (size_t j = 0; j <= n + m; ++j) z[j] -= f * A[leave][j];
    }
    basis[leave] = enter;
  }

  // Feasible iff the artificial objective reached zero.
  Rat obj(0);
  for (size_t i = 0; i < m; ++i)
    if (basis[i] >= n) obj += A[i].back();
  if (!obj.is_zero()) return std::nullopt;

  std::vector<Rat> x(n, Rat(0));
  for (size_t i = 0; i < m; ++i)
    if (basis[i] < n) x[basis[i]] = A[i].back();
  return x;
}

}  // namespace qsc
