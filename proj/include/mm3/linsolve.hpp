#pragma once

#include "mm3/coefficient.hpp"

#include <vector>

namespace mm3::linsolve {

using Q = GaussianRational;

struct Solution {
  std::vector<Q> x;
  std::vector<Q> residual;  // A x - b
  int rank = 0;
  std::vector<int> free_columns;  // set to zero
  bool exact = false;             // A x = b holds exactly
};

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<int> rref(std::vector<std::vector<Q>>& m, int ncols) {
  std::vector<int> pivots;
  int row = 0;
  const int nrows = static_cast<int>(m.size());
  for (int col = 0; col < ncols && row < nrows; ++col) {
    int p = -1;
    for (int r = row; r < nrows; ++r)
      if (!m[r][col].is_zero()) {
        p = r;
        break;
      }
    if (p < 0) continue;
    std::swap(m[row], m[p]);
    Q inv = Q(1) / m[row][col];
    for (auto& v : m[row]) v = v * inv;
    for (int r = 0; r < nrows; ++r) {
      if (r == row || m[r][col].is_zero()) continue;
      Q f = m[r][col];
      for (std::size_t c = 0; c < m[r].size(); ++c) m[r][c] = m[r][c] - f * m[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

/// Exact least squares through the normal equations A^H A x = A^H b; free variables are 0.
inline Solution least_squares(const std::vector<std::vector<Q>>& a, const std::vector<Q>& b, int n) {
  const std::size_t m = a.size();
  std::vector<std::vector<Q>> aug(n, std::vector<Q>(n + 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Q s;
      for (std::size_t k = 0; k < m; ++k) s = s + a[k][i].conj() * a[k][j];
      aug[i][j] = s;
    }
    Q s;
    for (std::size_t k = 0; k < m; ++k) s = s + a[k][i].conj() * b[k];
    aug[i][n] = s;
  }
  auto pivots = rref(aug, n);
  Solution out;
  out.rank = static_cast<int>(pivots.size());
  out.x.assign(n, Q());
  for (std::size_t r = 0; r < pivots.size(); ++r) out.x[pivots[r]] = aug[r][n];
  std::vector<bool> is_pivot(n, false);
  for (int p : pivots) is_pivot[p] = true;
  for (int c = 0; c < n; ++c)
    if (!is_pivot[c]) out.free_columns.push_back(c);
  out.exact = true;
  for (std::size_t k = 0; k < m; ++k) {
    Q s;
    for (int j = 0; j < n; ++j) s = s + a[k][j] * out.x[j];
    s = s - b[k];
    out.exact = out.exact && s.is_zero();
    out.residual.push_back(s);
  }
  return out;
}

}  // namespace mm3::linsolve
