#include "gerve/assignment.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gerve {

namespace {

// Shortest augmenting path solver for rows <= cols. Returns row -> col.
std::vector<int> solve_rows_le_cols(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
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
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
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
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

// Optimal cost of matching min(rows, cols) pairs.
double optimal_cost(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  const bool transpose = a.rows() > a.cols();
  const Matrix t = transpose ? Matrix(a.transpose()) : a;
  const auto r2c = solve_rows_le_cols(t);
  double c = 0.0;
  for (std::size_t i = 0; i < r2c.size(); ++i) c += t(static_cast<Eigen::Index>(i), r2c[i]);
  return c;
}

Matrix submatrix(const Matrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix s(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(rows[i], cols[j]);
    }
  }
  return s;
}

}  // namespace

Assignment hungarian(const Matrix& cost) {
  Assignment out;
  const int m = static_cast<int>(cost.rows());
  const int n = static_cast<int>(cost.cols());
  if (m == 0 || n == 0) {
    out.row_to_col.assign(static_cast<std::size_t>(m), -1);
    return out;
  }
  if (!cost.allFinite()) throw InvalidInput("hungarian: costs must be finite");

  const double best = optimal_cost(cost);
  const double tol = 1e-12 * std::max(1.0, std::abs(best));

  // Fix rows one at a time to the smallest option that keeps the total optimal.
  std::vector<int> free_cols(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) free_cols[static_cast<std::size_t>(j)] = j;
  double fixed = 0.0;
  out.row_to_col.assign(static_cast<std::size_t>(m), -1);
  for (int i = 0; i < m; ++i) {
    std::vector<int> rest_rows;
    for (int r = i + 1; r < m; ++r) rest_rows.push_back(r);
    const auto remaining_rows = static_cast<std::size_t>(m - i);
    bool placed = false;
    for (std::size_t c = 0; c < free_cols.size() && !placed; ++c) {
      const int col = free_cols[c];
      std::vector<int> rest_cols = free_cols;
      rest_cols.erase(rest_cols.begin() + static_cast<std::ptrdiff_t>(c));
      const double total =
          fixed + cost(i, col) + optimal_cost(submatrix(cost, rest_rows, rest_cols));
      if (total <= best + tol) {
        out.row_to_col[static_cast<std::size_t>(i)] = col;
        fixed += cost(i, col);
        free_cols = std::move(rest_cols);
        placed = true;
      }
    }
    if (!placed) {
      // Leaving the row out is only possible while enough rows remain for the columns.
      if (remaining_rows - 1 < free_cols.size()) {
        throw NumericFailure("hungarian: tie-breaking failed to reproduce the optimum");
      }
    }
  }
  out.cost = 0.0;
  for (int i = 0; i < m; ++i) {
    const int c = out.row_to_col[static_cast<std::size_t>(i)];
    if (c >= 0) out.cost += cost(i, c);
  }
  return out;
}

}  // namespace gerve
