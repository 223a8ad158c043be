#include "vspk/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "assignment.hpp"
#include "vspk/error.hpp"

namespace vspk {

PersistenceDiagram::PersistenceDiagram(int dimension, std::vector<BirthDeath> pairs)
    : dimension_(dimension), pairs_(std::move(pairs)) {
    if (dimension_ < 0) throw InputError("homology dimension must be nonnegative");
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        const auto& p = pairs_[i];
        if (!std::isfinite(p.birth) || !std::isfinite(p.death))
            throw InputError("diagram pair " + std::to_string(i) + " is not finite");
        if (p.birth < 0.0) throw InputError("diagram pair " + std::to_string(i) + " has negative birth");
        if (!(p.death > p.birth))
            throw InputError("diagram pair " + std::to_string(i) + " is not above the diagonal");
    }
}

std::vector<std::size_t> persistence_order(const PersistenceDiagram& d) {
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const double pi = persistence(d[i]), pj = persistence(d[j]);
        if (pi != pj) return pi > pj;
        return d[i].birth < d[j].birth;
    });
    return order;
}

PersistenceDiagram top_k_persistent(const PersistenceDiagram& d, std::size_t k) {
    if (d.size() <= k) return d;
    auto order = persistence_order(d);
    order.resize(k);
    std::sort(order.begin(), order.end());
    std::vector<BirthDeath> kept;
    kept.reserve(k);
    for (auto i : order) kept.push_back(d[i]);
    return PersistenceDiagram(d.dimension(), std::move(kept));
}

namespace {

double linf(const BirthDeath& x, const BirthDeath& y) {
    return std::max(std::abs(x.birth - y.birth), std::abs(x.death - y.death));
}

double half_persistence(const BirthDeath& x) { return 0.5 * persistence(x); }

void require_same_dimension(const PersistenceDiagram& a, const PersistenceDiagram& b) {
    if (a.dimension() != b.dimension())
        throw InputError("diagrams of different homology dimensions cannot be compared");
}

// Rows: points of `a`, then diagonal copies of the points of `b`.
// Columns: points of `b`, then diagonal copies of the points of `a`.
bool bottleneck_feasible(const PersistenceDiagram& a, const PersistenceDiagram& b, double t) {
    const std::size_t na = a.size(), nb = b.size(), n = na + nb;
    std::vector<char> adj(n * n, 0);
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) adj[i * n + j] = linf(a[i], b[j]) <= t;
        const char to_diag = half_persistence(a[i]) <= t;
        for (std::size_t k = 0; k < na; ++k) adj[i * n + nb + k] = to_diag;
    }
    for (std::size_t r = na; r < n; ++r) {
        for (std::size_t j = 0; j < nb; ++j) adj[r * n + j] = half_persistence(b[j]) <= t;
        for (std::size_t k = 0; k < na; ++k) adj[r * n + nb + k] = 1;
    }
    return detail::has_perfect_matching(adj, n);
}

}  // namespace

double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b) {
    require_same_dimension(a, b);
    std::vector<double> candidates{0.0};
    for (const auto& x : a.pairs()) {
        candidates.push_back(half_persistence(x));
        for (const auto& y : b.pairs()) candidates.push_back(linf(x, y));
    }
    for (const auto& y : b.pairs()) candidates.push_back(half_persistence(y));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // Matching everything to the diagonal is always feasible at the largest
    // half-persistence, so the last candidate is feasible.
    std::size_t lo = 0, hi = candidates.size() - 1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (bottleneck_feasible(a, b, candidates[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return candidates[lo];
}

double wasserstein_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, double p) {
    require_same_dimension(a, b);
    if (!(p >= 1.0) || !std::isfinite(p)) throw InputError("wasserstein_distance: p must be finite and >= 1");
    const std::size_t na = a.size(), nb = b.size(), n = na + nb;
    if (n == 0) return 0.0;
    std::vector<double> cost(n * n, 0.0);
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) cost[i * n + j] = std::pow(linf(a[i], b[j]), p);
        const double to_diag = std::pow(half_persistence(a[i]), p);
        for (std::size_t k = 0; k < na; ++k) cost[i * n + nb + k] = to_diag;
    }
    for (std::size_t r = na; r < n; ++r)
        for (std::size_t j = 0; j < nb; ++j) cost[r * n + j] = std::pow(half_persistence(b[j]), p);

    const auto col_of = detail::solve_assignment(cost, n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += cost[i * n + col_of[i]];
    return std::pow(total, 1.0 / p);
}

double sliced_wasserstein_distance(const PersistenceDiagram& a, const PersistenceDiagram& b,
                                   int n_slices) {
    require_same_dimension(a, b);
    if (n_slices < 1) throw InputError("sliced_wasserstein_distance: n_slices must be >= 1");
    const std::size_t m = a.size() + b.size();
    if (m == 0) return 0.0;

    std::vector<double> va(m), vb(m);
    double sum = 0.0;
    for (int k = 0; k < n_slices; ++k) {
        const double theta = -std::numbers::pi / 2 + (k + 0.5) * std::numbers::pi / n_slices;
        const double c = std::cos(theta), s = std::sin(theta);
        std::size_t ia = 0, ib = 0;
        for (const auto& x : a.pairs()) {
            va[ia++] = x.birth * c + x.death * s;
            const double mid = 0.5 * (x.birth + x.death);
            vb[ib++] = mid * (c + s);
        }
        for (const auto& y : b.pairs()) {
            vb[ib++] = y.birth * c + y.death * s;
            const double mid = 0.5 * (y.birth + y.death);
            va[ia++] = mid * (c + s);
        }
        std::sort(va.begin(), va.end());
        std::sort(vb.begin(), vb.end());
        double slice = 0.0;
        for (std::size_t i = 0; i < m; ++i) slice += std::abs(va[i] - vb[i]);
        sum += slice;
    }
    return sum / n_slices;
}

}  // namespace vspk
