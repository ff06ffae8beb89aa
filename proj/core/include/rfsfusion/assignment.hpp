#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace rfs {

/// Minimum-cost assignment of every row to a distinct column.
struct Assignment {
    std::vector<int> row_to_col;    // one entry per row
    double cost = 0.0;
};

/// Solve the rectangular assignment problem (rows <= cols, all rows
/// assigned) by shortest augmenting paths. Entries of +infinity mark
/// forbidden pairs. Returns nullopt when no feasible assignment exists.
std::optional<Assignment> solve_assignment(const Eigen::MatrixXd& cost);

/// The k lowest-cost assignments in nondecreasing cost order (Murty's
/// partitioning over solve_assignment). Fewer than k are returned when the
/// feasible set is smaller.
std::vector<Assignment> murty(const Eigen::MatrixXd& cost, int k);

} // namespace rfs
