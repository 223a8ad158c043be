#include "assignment.hpp"

#include <algorithm>
#include <limits>

namespace vspk::detail {

std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials; column 0 is the virtual source of each augmentation.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> row_of(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        row_of[0] = i;
        std::size_t j0 = 0;
        std::vector<double> min_slack(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = row_of[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double reduced = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (reduced < min_slack[j]) {
                    min_slack[j] = reduced;
                    way[j] = j0;
                }
                if (min_slack[j] < delta) {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
        } while (row_of[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> col_of(n, 0);
    for (std::size_t j = 1; j <= n; ++j)
        if (row_of[j] != 0) col_of[row_of[j] - 1] = j - 1;
    return col_of;
}

namespace {

bool augment(std::size_t row, const std::vector<char>& adjacent, std::size_t n,
             std::vector<char>& visited, std::vector<std::size_t>& match_col) {
    constexpr std::size_t unmatched = std::numeric_limits<std::size_t>::max();
    for (std::size_t j = 0; j < n; ++j) {
        if (!adjacent[row * n + j] || visited[j]) continue;
        visited[j] = 1;
        if (match_col[j] == unmatched || augment(match_col[j], adjacent, n, visited, match_col)) {
            match_col[j] = row;
            return true;
        }
    }
    return false;
}

}  // namespace

bool has_perfect_matching(const std::vector<char>& adjacent, std::size_t n) {
    std::vector<std::size_t> match_col(n, std::numeric_limits<std::size_t>::max());
    std::vector<char> visited(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(visited.begin(), visited.end(), 0);
        if (!augment(i, adjacent, n, visited, match_col)) return false;
    }
    return true;
}

}  // namespace vspk::detail
