#include "vidcut/hungarian.hpp"

#include <limits>
#include <stdexcept>

namespace vidcut {
namespace {

// Shortest augmenting path with potentials, 1-based internally; requires
// n <= m. Returns the column of each row.
std::vector<int> solve(const std::vector<double>& a, int n, int m) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a[static_cast<std::size_t>(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) assignment[p[j] - 1] = j - 1;
  }
  return assignment;
}

}  // namespace

std::vector<int> hungarian_min_cost(const std::vector<double>& cost, int rows, int cols) {
  if (static_cast<std::size_t>(rows) * cols != cost.size()) {
    throw std::invalid_argument("cost matrix size mismatch");
  }
  if (rows == 0) return {};
  if (cols == 0) return std::vector<int>(rows, -1);
  if (rows <= cols) return solve(cost, rows, cols);
  std::vector<double> transposed(cost.size());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      transposed[static_cast<std::size_t>(c) * rows + r] = cost[static_cast<std::size_t>(r) * cols + c];
    }
  }
  const std::vector<int> by_col = solve(transposed, cols, rows);
  std::vector<int> out(rows, -1);
  for (int c = 0; c < cols; ++c) {
    if (by_col[c] >= 0) out[by_col[c]] = c;
  }
  return out;
}

}  // namespace vidcut
