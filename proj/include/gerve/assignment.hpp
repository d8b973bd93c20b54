#pragma once

#include "gerve/types.hpp"

#include <vector>

namespace gerve {

struct Assignment {
  // row_to_col[i] is the column matched to row i, or -1 when row i is left out
  // (only possible when there are more rows than columns).
  std::vector<int> row_to_col;
  double cost = 0.0;
};

/// Minimum-cost rectangular assignment matching min(m, n) pairs.
///
/// Among optimal assignments the lexicographically smallest row_to_col (with -1 ranked
/// after every column) is returned. Costs within 1e-12 relative of the optimum count as
/// ties. Empty input gives an empty assignment.
Assignment hungarian(const Matrix& cost);

}  // namespace gerve
