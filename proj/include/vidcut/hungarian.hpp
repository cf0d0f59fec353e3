#pragma once

#include <vector>

namespace vidcut {

// Minimum-cost assignment on a rows x cols cost matrix (row-major).
// Returns, for every row, its assigned column or -1 when rows > cols.
std::vector<int> hungarian_min_cost(const std::vector<double>& cost, int rows,
                                    int cols);

}  // namespace vidcut
