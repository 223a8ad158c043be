#pragma once

// Generators and brute-force reference implementations shared by the test
// suites. The references are deliberately naive and share no code with the
// library.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "vspk/diagram.hpp"
#include "vspk/geometry.hpp"
#include "vspk/gram.hpp"
#include "vspk/random.hpp"

namespace testing {

inline vspk::PointCloud random_cloud(vspk::Rng& rng, std::size_t n, std::size_t dim = 2, double scale = 1.0) {
    std::vector<double> coords(n * dim);
    for (auto& x : coords) x = scale * rng.uniform();
    return vspk::PointCloud(coords, dim);
}

/// Up to max_points pairs with births in [0, scale) and persistence in (0, scale].
inline vspk::PersistenceDiagram random_diagram(vspk::Rng& rng, std::size_t max_points, double scale = 1.0,
                                               std::size_t min_points = 0) {
    const auto n = min_points + rng.below(max_points - min_points + 1);
    std::vector<vspk::BirthDeath> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        const double b = scale * rng.uniform();
        const double p = scale * (1.0 - rng.uniform());  // (0, scale]
        pairs.push_back({b, b + p});
    }
    return vspk::PersistenceDiagram(1, pairs);
}

inline double linf(double b1, double d1, double b2, double d2) {
    return std::max(std::abs(b1 - b2), std::abs(d1 - d2));
}

/// Enumerates every bijection of the diagonal-augmented point sets and returns
/// min over bijections of the p-cost sum (p > 0) or of the max cost (p = 0).
inline double brute_force_matching(const vspk::PersistenceDiagram& a, const vspk::PersistenceDiagram& b, double p) {
    const std::size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;
    if (n == 0) return 0.0;
    // slot i < n1: point of a, else a diagonal slot; same for b.
    const auto cost = [&](std::size_t i, std::size_t j) {
        const bool ra = i < n1, rb = j < n2;
        if (ra && rb) return linf(a[i].birth, a[i].death, b[j].birth, b[j].death);
        if (ra) return (a[i].death - a[i].birth) / 2.0;
        if (rb) return (b[j].death - b[j].birth) / 2.0;
        return 0.0;
    };
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = INFINITY;
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = cost(i, perm[i]);
            total = p == 0.0 ? std::max(total, c) : total + std::pow(c, p);
        }
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return p == 0.0 ? best : std::pow(best, 1.0 / p);
}

/// Sliced Wasserstein distance by a left-endpoint rule over `steps` directions
/// in [-pi/2, pi/2); converges to the same mean-over-directions normalization.
inline double dense_sliced_wasserstein(const vspk::PersistenceDiagram& a, const vspk::PersistenceDiagram& b,
                                       int steps) {
    const double pi = std::acos(-1.0);
    double sum = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double theta = -pi / 2 + pi * k / steps;
        const double c = std::cos(theta), s = std::sin(theta);
        std::vector<double> u, v;
        for (const auto& x : a.pairs()) {
            u.push_back(x.birth * c + x.death * s);
            const double m = (x.birth + x.death) / 2;
            v.push_back(m * c + m * s);
        }
        for (const auto& x : b.pairs()) {
            v.push_back(x.birth * c + x.death * s);
            const double m = (x.birth + x.death) / 2;
            u.push_back(m * c + m * s);
        }
        std::sort(u.begin(), u.end());
        std::sort(v.begin(), v.end());
        for (std::size_t i = 0; i < u.size(); ++i) sum += std::abs(u[i] - v[i]);
    }
    return sum / steps;
}

inline double trace(const vspk::GramMatrix& k) {
    double t = 0.0;
    for (std::size_t i = 0; i < k.rows(); ++i) t += k(i, i);
    return t;
}

inline double min_eigenvalue(const vspk::GramMatrix& k) {
    Eigen::MatrixXd m(k.rows(), k.cols());
    for (std::size_t i = 0; i < k.rows(); ++i)
        for (std::size_t j = 0; j < k.cols(); ++j) m(i, j) = k(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

/// min eigenvalue >= -tol * max(1, trace).
inline bool is_psd(const vspk::GramMatrix& k, double tol = 1e-8) {
    return min_eigenvalue(k) >= -tol * std::max(1.0, trace(k));
}

inline bool is_symmetric(const vspk::GramMatrix& k) {
    for (std::size_t i = 0; i < k.rows(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (k(i, j) != k(j, i)) return false;
    return true;
}

}  // namespace testing
