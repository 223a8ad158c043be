#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vspk {

struct BirthDeath {
    double birth = 0.0;
    double death = 0.0;

    friend bool operator==(const BirthDeath&, const BirthDeath&) = default;
};

/// death - birth.
inline double persistence(const BirthDeath& p) { return p.death - p.birth; }

/// Multiset of finite off-diagonal points (0 <= birth < death < inf) for one
/// homology dimension. The diagonal is implicit: metrics and kernels account for
/// it analytically and it is never stored.
class PersistenceDiagram {
public:
    PersistenceDiagram() = default;
    explicit PersistenceDiagram(int dimension) : dimension_(dimension) {}

    /// Throws InputError if any pair is non-finite, has negative birth, or lies
    /// on or below the diagonal.
    PersistenceDiagram(int dimension, std::vector<BirthDeath> pairs);

    int dimension() const { return dimension_; }
    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }
    std::span<const BirthDeath> pairs() const { return pairs_; }
    const BirthDeath& operator[](std::size_t i) const { return pairs_[i]; }

    friend bool operator==(const PersistenceDiagram&, const PersistenceDiagram&) = default;

private:
    int dimension_ = 0;
    std::vector<BirthDeath> pairs_;
};

/// Indices of the pairs ordered by decreasing persistence; ties go to the
/// smaller birth, then to input order.
std::vector<std::size_t> persistence_order(const PersistenceDiagram& d);

/// The k most persistent pairs, kept in their original relative order.
PersistenceDiagram top_k_persistent(const PersistenceDiagram& d, std::size_t k);

/// Exact bottleneck distance (max-norm ground metric, diagonal matches at
/// half-persistence). Binary search over the finite candidate set with
/// augmenting-path matching as the feasibility test.
double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b);

/// Exact p-Wasserstein distance via the diagonal-augmented square assignment.
double wasserstein_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, double p);

/// Sliced Wasserstein distance, averaged over n_slices midpoint directions in
/// [-pi/2, pi/2).
double sliced_wasserstein_distance(const PersistenceDiagram& a, const PersistenceDiagram& b,
                                   int n_slices);

}  // namespace vspk
