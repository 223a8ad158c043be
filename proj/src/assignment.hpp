#pragma once

#include <cstddef>
#include <vector>

namespace vspk::detail {

/// Minimum-cost perfect assignment on a dense n x n cost matrix (row-major).
/// Shortest augmenting path Hungarian method with potentials, O(n^3).
/// Returns the column assigned to each row.
std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n);

/// Maximum bipartite matching on an n x n adjacency matrix; true if perfect.
bool has_perfect_matching(const std::vector<char>& adjacent, std::size_t n);

}  // namespace vspk::detail
