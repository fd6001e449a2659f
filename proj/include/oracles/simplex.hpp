#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "oracles/rational.hpp"

namespace oracles {

struct FeasibilityResult {
  bool feasible = false;
  std::vector<Rational> x;  // a basic feasible point when feasible
};

// Decides whether {x >= 0 : A x = b} is nonempty by exact phase-1 simplex
// with Bland's pivoting rule.
inline FeasibilityResult solve_nonnegative(const std::vector<std::vector<Rational>>& A, const std::vector<Rational>& b) {
  const std::size_t m = A.size();
  if (b.size() != m) throw DomainError("right-hand side length does not match the constraint count");
  const std::size_t n = m == 0 ? 0 : A.front().size();
  for (const auto& row : A)
    if (row.size() != n) throw DomainError("ragged constraint matrix");
  if (m == 0) return {true, std::vector<Rational>(n, Rational(0))};

  // Columns: n originals, m artificials, then the right-hand side.
  const std::size_t width = n + m + 1;
  const std::size_t rhs = n + m;
  std::vector<std::vector<Rational>> t(m, std::vector<Rational>(width, Rational(0)));
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) {
    bool flip = b[r] < 0;
    for (std::size_t j = 0; j < n; ++j) t[r][j] = flip ? Rational(-A[r][j]) : A[r][j];
    t[r][rhs] = flip ? Rational(-b[r]) : b[r];
    t[r][n + r] = 1;
    basis[r] = n + r;
  }
  // Reduced costs of the phase-1 objective (sum of artificials).
  std::vector<Rational> cost(width, Rational(0));
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t j = 0; j < width; ++j)
      if (j < n || j == rhs) cost[j] -= t[r][j];

  while (true) {
    std::optional<std::size_t> enter;
    for (std::size_t j = 0; j < n + m && !enter; ++j)
      if (cost[j] < 0) enter = j;
    if (!enter) break;
    const std::size_t e = *enter;
    std::optional<std::size_t> leave;
    Rational best;
    for (std::size_t r = 0; r < m; ++r) {
      if (t[r][e] <= 0) continue;
      Rational ratio = t[r][rhs] / t[r][e];
      if (!leave || ratio < best || (ratio == best && basis[r] < basis[*leave])) {
        leave = r;
        best = ratio;
      }
    }
    if (!leave) break;  // unbounded direction; cannot happen for a phase-1 objective bounded below by 0
    const std::size_t l = *leave;
    Rational pivot = t[l][e];
    for (auto& v : t[l]) v /= pivot;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == l || t[r][e] == 0) continue;
      Rational f = t[r][e];
      for (std::size_t j = 0; j < width; ++j) t[r][j] -= f * t[l][j];
    }
    if (cost[e] != 0) {
      Rational f = cost[e];
      for (std::size_t j = 0; j < width; ++j) cost[j] -= f * t[l][j];
    }
    basis[l] = e;
  }

  FeasibilityResult out;
  out.feasible = cost[rhs] == 0;
  if (out.feasible) {
    out.x.assign(n, Rational(0));
    for (std::size_t r = 0; r < m; ++r)
      if (basis[r] < n) out.x[basis[r]] = t[r][rhs];
  }
  return out;
}

}  // namespace oracles
