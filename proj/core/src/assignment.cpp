#include "rfsfusion/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>

namespace rfs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Shortest-augmenting-path assignment on an n x m matrix (n <= m), 1-based
/// potentials. Rows of +inf-only options make the problem infeasible.
std::optional<Assignment> solve_dense(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    if (n == 0) {
        return Assignment{{}, 0.0};
    }
    if (n > m) {
        return std::nullopt;
    }

    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<int> match(static_cast<std::size_t>(m) + 1, 0);   // col -> row (1-based)
    std::vector<int> way(static_cast<std::size_t>(m) + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> min_reduced(static_cast<std::size_t>(m) + 1, kInf);
        std::vector<bool> used(static_cast<std::size_t>(m) + 1, false);
        do {
            used[static_cast<std::size_t>(j0)] = true;
            const int i0 = match[static_cast<std::size_t>(j0)];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double base = cost(i0 - 1, j - 1);
                const double cur = base == kInf
                                       ? kInf
                                       : base - u[static_cast<std::size_t>(i0)] -
                                             v[static_cast<std::size_t>(j)];
                if (cur < min_reduced[static_cast<std::size_t>(j)]) {
                    min_reduced[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (min_reduced[static_cast<std::size_t>(j)] < delta) {
                    delta = min_reduced[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            if (!(delta < kInf)) {
                return std::nullopt;   // row i cannot be assigned
            }
            for (int j = 0; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    min_reduced[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<std::size_t>(j0)] != 0);
        // Augment along the stored path.
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    Assignment result;
    result.row_to_col.assign(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= m; ++j) {
        const int i = match[static_cast<std::size_t>(j)];
        if (i > 0) {
            result.row_to_col[static_cast<std::size_t>(i) - 1] = j - 1;
        }
    }
    result.cost = 0.0;
    for (int i = 0; i < n; ++i) {
        result.cost += cost(i, result.row_to_col[static_cast<std::size_t>(i)]);
    }
    if (!std::isfinite(result.cost)) {
        return std::nullopt;
    }
    return result;
}

/// A Murty subproblem: pairs forced into the solution and pairs excluded
/// from it.
struct Subproblem {
    std::vector<std::pair<int, int>> forced;
    std::vector<std::pair<int, int>> forbidden;
    Assignment solution;

    bool operator>(const Subproblem& other) const {
        return solution.cost > other.solution.cost;
    }
};

/// Solve under forced/forbidden constraints by reducing to a submatrix over
/// the free rows and columns.
std::optional<Assignment> solve_constrained(const Eigen::MatrixXd& cost,
                                            const std::vector<std::pair<int, int>>& forced,
                                            const std::vector<std::pair<int, int>>& forbidden) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());

    std::vector<bool> row_fixed(static_cast<std::size_t>(n), false);
    std::vector<bool> col_fixed(static_cast<std::size_t>(m), false);
    double fixed_cost = 0.0;
    for (const auto& [r, c] : forced) {
        row_fixed[static_cast<std::size_t>(r)] = true;
        col_fixed[static_cast<std::size_t>(c)] = true;
        fixed_cost += cost(r, c);
    }
    if (!std::isfinite(fixed_cost)) {
        return std::nullopt;
    }

    std::vector<int> free_rows;
    std::vector<int> free_cols;
    for (int r = 0; r < n; ++r) {
        if (!row_fixed[static_cast<std::size_t>(r)]) free_rows.push_back(r);
    }
    for (int c = 0; c < m; ++c) {
        if (!col_fixed[static_cast<std::size_t>(c)]) free_cols.push_back(c);
    }

    Eigen::MatrixXd sub(free_rows.size(), free_cols.size());
    for (std::size_t ri = 0; ri < free_rows.size(); ++ri) {
        for (std::size_t ci = 0; ci < free_cols.size(); ++ci) {
            sub(static_cast<Eigen::Index>(ri), static_cast<Eigen::Index>(ci)) =
                cost(free_rows[ri], free_cols[ci]);
        }
    }
    for (const auto& [r, c] : forbidden) {
        const auto rit = std::find(free_rows.begin(), free_rows.end(), r);
        const auto cit = std::find(free_cols.begin(), free_cols.end(), c);
        if (rit != free_rows.end() && cit != free_cols.end()) {
            sub(rit - free_rows.begin(), cit - free_cols.begin()) = kInf;
        }
    }

    auto sub_solution = solve_dense(sub);
    if (!sub_solution) {
        return std::nullopt;
    }

    Assignment full;
    full.row_to_col.assign(static_cast<std::size_t>(n), -1);
    for (const auto& [r, c] : forced) {
        full.row_to_col[static_cast<std::size_t>(r)] = c;
    }
    for (std::size_t ri = 0; ri < free_rows.size(); ++ri) {
        full.row_to_col[static_cast<std::size_t>(free_rows[ri])] =
            free_cols[static_cast<std::size_t>(sub_solution->row_to_col[ri])];
    }
    full.cost = fixed_cost + sub_solution->cost;
    return full;
}

} // namespace

std::optional<Assignment> solve_assignment(const Eigen::MatrixXd& cost) {
    return solve_dense(cost);
}

std::vector<Assignment> murty(const Eigen::MatrixXd& cost, int k) {
    std::vector<Assignment> results;
    if (k <= 0) {
        return results;
    }
    auto best = solve_dense(cost);
    if (!best) {
        return results;
    }

    std::priority_queue<Subproblem, std::vector<Subproblem>, std::greater<>> queue;
    queue.push(Subproblem{{}, {}, std::move(*best)});

    while (!queue.empty() && static_cast<int>(results.size()) < k) {
        Subproblem node = queue.top();
        queue.pop();
        results.push_back(node.solution);

        // Partition on the pairs of this solution that were not forced.
        std::vector<std::pair<int, int>> free_pairs;
        for (int r = 0; r < static_cast<int>(node.solution.row_to_col.size()); ++r) {
            const std::pair<int, int> pair{r, node.solution.row_to_col[static_cast<std::size_t>(r)]};
            if (std::find(node.forced.begin(), node.forced.end(), pair) == node.forced.end()) {
                free_pairs.push_back(pair);
            }
        }
        std::vector<std::pair<int, int>> forced = node.forced;
        for (const auto& pair : free_pairs) {
            auto forbidden = node.forbidden;
            forbidden.push_back(pair);
            if (auto solution = solve_constrained(cost, forced, forbidden)) {
                queue.push(Subproblem{forced, std::move(forbidden), std::move(*solution)});
            }
            forced.push_back(pair);
        }
    }
    return results;
}

} // namespace rfs
