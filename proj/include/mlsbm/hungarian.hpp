#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

namespace mlsbm {

// O(n^3) assignment via shortest augmenting paths with potentials.
// cost is square; returns the minimizing row -> column map.
inline std::vector<int> hungarian_min(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    for (const auto& row : cost) {
        if (static_cast<int>(row.size()) != n) throw std::invalid_argument("cost not square");
    }
    const double inf = std::numeric_limits<double>::infinity();
    // 1-based internal arrays; p[j] = row matched to column j
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
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
    std::vector<int> rowsol(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (p[j] > 0) rowsol[p[j] - 1] = j - 1;
    }
    return rowsol;
}

// Maximizing wrapper over a (possibly rectangular) profit matrix; pads with
// zero profit to square. Returns row -> column (padded columns possible).
inline std::vector<int> hungarian_max(const std::vector<std::vector<double>>& profit) {
    const int rows = static_cast<int>(profit.size());
    int cols = 0;
    for (const auto& r : profit) cols = std::max(cols, static_cast<int>(r.size()));
    const int n = std::max(rows, cols);
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < static_cast<int>(profit[i].size()); ++j) {
            cost[i][j] = -profit[i][j];
        }
    }
    auto sol = hungarian_min(cost);
    sol.resize(rows);
    return sol;
}

}  // namespace mlsbm
