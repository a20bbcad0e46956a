#pragma once

// Exact linear assignment on small dense cost matrices. Hungarian
// (shortest augmenting path with potentials, O(r^3)), followed by a
// tie-break pass that selects the lexicographically smallest optimal
// assignment. The tie-break pass only does work when optima are tied,
// which for generic real costs never happens.

#include "uls/core.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace uls {

struct AssignmentResult {
    std::vector<int> assignment;  // sigma: row i is matched to column sigma[i]
    double objective = 0.0;       // sum of the selected cost entries
};

namespace detail {

struct HungarianSolution {
    std::vector<int> row_to_col;
    std::vector<double> u, v;  // dual potentials; matched edges are tight
};

// Shortest-augmenting-path Hungarian method, 1-indexed internally.
inline HungarianSolution hungarian_min(const Mat& C) {
    const int r = static_cast<int>(C.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(r) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(r) + 1, 0.0);
    std::vector<int> p(static_cast<std::size_t>(r) + 1, 0);    // p[j] = row matched to col j
    std::vector<int> way(static_cast<std::size_t>(r) + 1, 0);

    for (int i = 1; i <= r; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(r) + 1, inf);
        std::vector<bool> used(static_cast<std::size_t>(r) + 1, false);
        do {
            used[static_cast<std::size_t>(j0)] = true;
            const int i0 = p[static_cast<std::size_t>(j0)];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= r; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = C(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= r; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    HungarianSolution sol;
    sol.row_to_col.assign(static_cast<std::size_t>(r), -1);
    for (int j = 1; j <= r; ++j)
        sol.row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) - 1] = j - 1;
    sol.u.assign(u.begin() + 1, u.end());
    sol.v.assign(v.begin() + 1, v.end());
    return sol;
}

// Alternating-path search over tight edges: can the (remaining) matching be
// patched so that `row` gets some column, respecting locked columns?
inline bool augment_tight(int row, const std::vector<std::vector<int>>& tight_cols,
                          std::vector<int>& col_to_row, std::vector<int>& row_to_col,
                          const std::vector<bool>& locked_col, std::vector<bool>& visited_col) {
    for (int c : tight_cols[static_cast<std::size_t>(row)]) {
        if (locked_col[static_cast<std::size_t>(c)] || visited_col[static_cast<std::size_t>(c)])
            continue;
        visited_col[static_cast<std::size_t>(c)] = true;
        const int owner = col_to_row[static_cast<std::size_t>(c)];
        if (owner < 0 ||
            augment_tight(owner, tight_cols, col_to_row, row_to_col, locked_col, visited_col)) {
            col_to_row[static_cast<std::size_t>(c)] = row;
            row_to_col[static_cast<std::size_t>(row)] = c;
            return true;
        }
    }
    return false;
}

// Restrict to edges with zero reduced cost (every optimal assignment lives
// there, by complementary slackness) and greedily pick the smallest feasible
// column per row.
inline std::vector<int> lexicographic_min_over_optima(const Mat& C,
                                                      const HungarianSolution& sol) {
    const int r = static_cast<int>(C.rows());
    // Tie tolerance: exact-arithmetic inputs (integer costs) give reduced
    // costs of exactly zero on optimal edges, and the float dust from the
    // dual updates sits near machine epsilon, far below this cutoff. Cost
    // gaps above the cutoff are treated as genuine, not ties.
    const double scale = std::max(1.0, C.cwiseAbs().maxCoeff());
    const double tol = 1e-13 * scale;

    std::vector<std::vector<int>> tight_cols(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            if (C(i, j) - sol.u[static_cast<std::size_t>(i)] - sol.v[static_cast<std::size_t>(j)] <=
                tol)
                tight_cols[static_cast<std::size_t>(i)].push_back(j);

    std::vector<int> row_to_col = sol.row_to_col;
    std::vector<int> col_to_row(static_cast<std::size_t>(r), -1);
    for (int i = 0; i < r; ++i) col_to_row[static_cast<std::size_t>(row_to_col[static_cast<std::size_t>(i)])] = i;

    std::vector<bool> locked_col(static_cast<std::size_t>(r), false);
    for (int i = 0; i < r; ++i) {
        const int current = row_to_col[static_cast<std::size_t>(i)];
        for (int c : tight_cols[static_cast<std::size_t>(i)]) {
            if (c >= current) break;  // candidates are ascending; current is feasible
            if (locked_col[static_cast<std::size_t>(c)]) continue;
            // Tentatively hand column c to row i; the displaced owner must be
            // re-routable through tight edges (the freed column `current` is
            // the only open slot).
            const int displaced = col_to_row[static_cast<std::size_t>(c)];
            col_to_row[static_cast<std::size_t>(current)] = -1;
            col_to_row[static_cast<std::size_t>(c)] = i;
            row_to_col[static_cast<std::size_t>(i)] = c;
            row_to_col[static_cast<std::size_t>(displaced)] = -1;
            std::vector<bool> visited(static_cast<std::size_t>(r), false);
            visited[static_cast<std::size_t>(c)] = true;
            if (augment_tight(displaced, tight_cols, col_to_row, row_to_col, locked_col,
                              visited)) {
                break;
            }
            // revert
            col_to_row[static_cast<std::size_t>(c)] = displaced;
            row_to_col[static_cast<std::size_t>(displaced)] = c;
            col_to_row[static_cast<std::size_t>(current)] = i;
            row_to_col[static_cast<std::size_t>(i)] = current;
        }
        locked_col[static_cast<std::size_t>(row_to_col[static_cast<std::size_t>(i)])] = true;
    }
    return row_to_col;
}

}  // namespace detail

/// Global minimizer of sum_i C(i, sigma(i)) over bijections; among tied
/// optima returns the lexicographically smallest sigma.
inline AssignmentResult lap_min(const Mat& C) {
    require(C.rows() == C.cols() && C.rows() >= 1, "lap_min: cost matrix must be square");
    require(all_finite(C), "lap_min: cost entries must be finite");

    const auto sol = detail::hungarian_min(C);
    AssignmentResult res;
    res.assignment = detail::lexicographic_min_over_optima(C, sol);
    res.objective = 0.0;
    for (int i = 0; i < static_cast<int>(C.rows()); ++i)
        res.objective += C(i, res.assignment[static_cast<std::size_t>(i)]);
    return res;
}

/// lap_max(C) == lap_min(-C) with the objective re-read off C.
inline AssignmentResult lap_max(const Mat& C) {
    AssignmentResult res = lap_min((-C).eval());
    res.objective = 0.0;
    for (int i = 0; i < static_cast<int>(C.rows()); ++i)
        res.objective += C(i, res.assignment[static_cast<std::size_t>(i)]);
    return res;
}

}  // namespace uls
