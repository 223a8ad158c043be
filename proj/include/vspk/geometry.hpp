#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vspk {

/// Finite set of points in R^v, stored row-major. Every point has the same
/// dimension and every coordinate is finite.
class PointCloud {
public:
    PointCloud() = default;

    /// `coordinates` holds size()*dim values row-major. Throws InputError on a
    /// ragged buffer, zero dimension or a non-finite coordinate.
    PointCloud(std::vector<double> coordinates, std::size_t dim);

    static PointCloud from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
    std::size_t dim() const { return dim_; }
    bool empty() const { return coords_.empty(); }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }
    std::span<const double> coordinates() const { return coords_; }

    friend bool operator==(const PointCloud&, const PointCloud&) = default;

private:
    std::vector<double> coords_;
    std::size_t dim_ = 0;
};

/// Dense symmetric matrix of nonnegative distances with zero diagonal.
class DistanceMatrix {
public:
    DistanceMatrix() = default;

    /// Validates symmetry, zero diagonal and nonnegativity (exact comparisons).
    DistanceMatrix(std::size_t n, std::vector<double> entries);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
    std::span<const double> entries() const { return d_; }

private:
    std::size_t n_ = 0;
    std::vector<double> d_;
};

DistanceMatrix pairwise_distances(const PointCloud& cloud);

/// Symmetric Hausdorff distance with the max-norm as ground metric.
double hausdorff_distance(const PointCloud& x, const PointCloud& y);

/// Starting point and twist parameter of a linked twisted map orbit.
struct OrbitParams {
    double x0 = 0.0;
    double y0 = 0.0;
    double r = 1.0;
    std::size_t n_points = 1;
};

/// t mod 1 mapped into [0, 1).
double wrap_unit(double t);

/// Iterates x' = x + r y(1-y) mod 1, then y' = y + r x'(1-x') mod 1, returning
/// n_points points starting with (x0, y0).
PointCloud linked_twisted_orbit(const OrbitParams& params);

}  // namespace vspk
