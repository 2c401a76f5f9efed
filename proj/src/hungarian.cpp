#include "vrec/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vrec/errors.hpp"

namespace vrec {

// Kuhn-Munkres with potentials, O(n^3) shortest augmenting paths.
std::vector<std::pair<int, int>> hungarian(const std::vector<std::vector<double>>& cost) {
    const int rows = static_cast<int>(cost.size());
    const int cols = rows ? static_cast<int>(cost[0].size()) : 0;
    if (rows == 0 || cols == 0) return {};

    double max_entry = 0.0;
    for (const auto& row : cost) {
        if (static_cast<int>(row.size()) != cols)
            throw ParameterError("hungarian: ragged cost matrix");
        for (double c : row) {
            if (!std::isfinite(c) || c < 0.0)
                throw ParameterError("hungarian: entries must be finite and non-negative");
            max_entry = std::max(max_entry, c);
        }
    }

    const int n = std::max(rows, cols);
    const double pad = max_entry * static_cast<double>(n) + 1.0;
    auto at = [&](int r, int c) { return (r < rows && c < cols) ? cost[r][c] : pad; };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);  // 1-based columns
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = match[j0], j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<std::pair<int, int>> result;
    result.reserve(std::min(rows, cols));
    for (int j = 1; j <= n; ++j) {
        int i = match[j];
        if (i >= 1 && i <= rows && j <= cols) result.emplace_back(i - 1, j - 1);
    }
    std::sort(result.begin(), result.end());
    return result;
}

double assignment_cost(const std::vector<std::vector<double>>& cost,
                       const std::vector<std::pair<int, int>>& assignment) {
    double total = 0.0;
    for (auto [r, c] : assignment) total += cost[r][c];
    return total;
}

}  // namespace vrec
