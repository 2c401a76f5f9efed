#pragma once

#include <utility>
#include <vector>

namespace vrec {

/// Minimum-cost assignment for a rectangular cost matrix of non-negative,
/// finite entries. Returns min(n, m) (row, col) pairs sorted by row; the
/// matrix is padded internally with a large sentinel to make it square.
/// Deterministic: equal-cost alternatives are resolved by the fixed
/// lexicographic (row, col) scan order. An empty matrix yields no pairs.
std::vector<std::pair<int, int>> hungarian(const std::vector<std::vector<double>>& cost);

/// Total cost of an assignment under a cost matrix.
double assignment_cost(const std::vector<std::vector<double>>& cost,
                       const std::vector<std::pair<int, int>>& assignment);

}  // namespace vrec
