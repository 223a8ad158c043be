#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "vspk/diagram.hpp"
#include "vspk/geometry.hpp"

namespace vspk {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kDefaultSimplexCap = 50'000'000;

/// Minimum over points of the maximum distance to the other points. Past this
/// radius the Rips complex is a cone, so no homology in dimension >= 1 is born
/// and every finite class has died.
double enclosing_radius(const DistanceMatrix& dm);

/// Vietoris-Rips filtration: simplices sorted by (radius, dimension,
/// lexicographic vertices). Faces always precede cofaces.
class Filtration {
public:
    std::size_t size() const { return radii_.size(); }
    int dimension(std::size_t k) const { return static_cast<int>(offsets_[k + 1] - offsets_[k]) - 1; }
    double radius(std::size_t k) const { return radii_[k]; }
    std::span<const std::uint32_t> vertices(std::size_t k) const {
        return {vertices_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]};
    }
    int max_dimension() const { return max_dim_; }
    double threshold() const { return threshold_; }

private:
    friend Filtration build_rips_filtration(const DistanceMatrix&, int, double, std::size_t);
    friend Filtration reorder_filtration(const Filtration&, std::span<const std::size_t>);

    std::vector<double> radii_;
    std::vector<std::uint32_t> offsets_{0};
    std::vector<std::uint32_t> vertices_;
    int max_dim_ = 0;
    double threshold_ = kUnbounded;
};

/// All simplices of dimension <= max_dim + 1 with diameter <= threshold.
/// Throws ComputeError when the simplex count exceeds `simplex_cap`.
Filtration build_rips_filtration(const DistanceMatrix& dm, int max_dim, double threshold = kUnbounded,
                                 std::size_t simplex_cap = kDefaultSimplexCap);

/// Same simplices in a caller-supplied order. The order must keep faces before
/// cofaces; InputError otherwise. Used to check tie-break independence.
Filtration reorder_filtration(const Filtration& f, std::span<const std::size_t> order);

struct PersistencePair {
    int dimension = 0;
    double birth = 0.0;
    double death = kUnbounded;

    bool essential() const { return death == kUnbounded; }
    friend bool operator==(const PersistencePair&, const PersistencePair&) = default;
};

/// Standard Z/2 column reduction of the boundary matrix with clearing.
/// Zero-persistence pairs are dropped; unpaired creators of dimension <= max
/// dimension are reported as essential.
std::vector<PersistencePair> compute_persistence(const Filtration& f);

/// Rips persistence directly from a distance matrix. For max_dim <= 1 this uses
/// union-find for H0 and a coboundary (cohomology) reduction for H1, which
/// never materializes the triangles; larger max_dim goes through
/// build_rips_filtration + compute_persistence. Both give the same pairs.
std::vector<PersistencePair> rips_persistence(const DistanceMatrix& dm, int max_dim,
                                              double threshold = kUnbounded,
                                              std::size_t simplex_cap = kDefaultSimplexCap);

/// What to do with essential (infinite) pairs when forming a diagram.
struct EssentialPolicy {
    bool cap_essential = false;
    double cap_value = 0.0;

    static EssentialPolicy drop() { return {}; }
    static EssentialPolicy cap(double value) { return {true, value}; }
};

/// Dimension-r pairs as a diagram. InputError if a cap is not above some birth.
PersistenceDiagram diagram_from_pairs(std::span<const PersistencePair> pairs, int r,
                                      EssentialPolicy policy = EssentialPolicy::drop());

inline constexpr std::size_t kOracleMaxPoints = 12;

/// Brute-force Betti number of the Rips complex at radius eps over Z/2:
/// dim C_r - rank d_r - rank d_{r+1} from dense boundary matrices. Exponential
/// cost; InputError above kOracleMaxPoints points.
int betti_number_oracle(const DistanceMatrix& dm, double eps, int r);

}  // namespace vspk
