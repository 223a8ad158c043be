#include "vspk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vspk/error.hpp"

namespace vspk {

PointCloud::PointCloud(std::vector<double> coordinates, std::size_t dim)
    : coords_(std::move(coordinates)), dim_(dim) {
    if (dim_ == 0) throw InputError("point cloud dimension must be at least 1");
    if (coords_.size() % dim_ != 0)
        throw InputError("coordinate buffer of length " + std::to_string(coords_.size()) +
                         " is not a multiple of dimension " + std::to_string(dim_));
    for (std::size_t k = 0; k < coords_.size(); ++k)
        if (!std::isfinite(coords_[k]))
            throw InputError("non-finite coordinate in point " + std::to_string(k / dim_));
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    const std::size_t dim = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != dim)
            throw InputError("point " + std::to_string(i) + " has dimension " +
                             std::to_string(rows[i].size()) + ", expected " +
                             std::to_string(dim));
        flat.insert(flat.end(), rows[i].begin(), rows[i].end());
    }
    return PointCloud(std::move(flat), dim);
}

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), d_(std::move(entries)) {
    if (d_.size() != n_ * n_) throw InputError("distance matrix has wrong number of entries");
    for (std::size_t i = 0; i < n_; ++i) {
        if (d_[i * n_ + i] != 0.0) throw InputError("distance matrix diagonal must be zero");
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double a = d_[i * n_ + j];
            if (!(a >= 0.0) || std::isinf(a))
                throw InputError("distance matrix entries must be finite and nonnegative");
            if (a != d_[j * n_ + i]) throw InputError("distance matrix must be symmetric");
        }
    }
}

DistanceMatrix pairwise_distances(const PointCloud& cloud) {
    if (cloud.empty()) throw InputError("pairwise_distances: empty point cloud");
    const std::size_t n = cloud.size();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = cloud.point(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto q = cloud.point(j);
            double s = 0.0;
            for (std::size_t k = 0; k < p.size(); ++k) s += (p[k] - q[k]) * (p[k] - q[k]);
            d[i * n + j] = d[j * n + i] = std::sqrt(s);
        }
    }
    return DistanceMatrix(n, std::move(d));
}

namespace {

double max_norm(std::span<const double> p, std::span<const double> q) {
    double m = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) m = std::max(m, std::abs(p[k] - q[k]));
    return m;
}

double directed_hausdorff(const PointCloud& x, const PointCloud& y) {
    double sup = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double inf = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < y.size() && inf > sup; ++j)
            inf = std::min(inf, max_norm(x.point(i), y.point(j)));
        sup = std::max(sup, inf);
    }
    return sup;
}

}  // namespace

double hausdorff_distance(const PointCloud& x, const PointCloud& y) {
    if (x.empty() || y.empty()) throw InputError("hausdorff_distance: empty point cloud");
    if (x.dim() != y.dim()) throw InputError("hausdorff_distance: dimension mismatch");
    return std::max(directed_hausdorff(x, y), directed_hausdorff(y, x));
}

double wrap_unit(double t) {
    const double w = t - std::floor(t);
    // t slightly below an integer can round up to exactly 1.
    return w >= 1.0 ? 0.0 : w;
}

PointCloud linked_twisted_orbit(const OrbitParams& params) {
    if (!(params.x0 >= 0.0 && params.x0 <= 1.0 && params.y0 >= 0.0 && params.y0 <= 1.0))
        throw InputError("orbit start must lie in [0,1]^2");
    if (!(params.r > 0.0) || !std::isfinite(params.r))
        throw InputError("orbit parameter r must be positive");
    if (params.n_points == 0) throw InputError("orbit needs at least one point");

    std::vector<double> coords;
    coords.reserve(2 * params.n_points);
    double x = wrap_unit(params.x0);
    double y = wrap_unit(params.y0);
    for (std::size_t n = 0; n < params.n_points; ++n) {
        coords.push_back(x);
        coords.push_back(y);
        x = wrap_unit(x + params.r * y * (1.0 - y));
        y = wrap_unit(y + params.r * x * (1.0 - x));
    }
    return PointCloud(std::move(coords), 2);
}

}  // namespace vspk
