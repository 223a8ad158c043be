#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "support.hpp"
#include "vspk/error.hpp"
#include "vspk/persistence.hpp"

using namespace vspk;

namespace {

const double kSqrt2 = std::sqrt(2.0);

DistanceMatrix square() { return pairwise_distances(PointCloud::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}})); }

std::vector<PersistencePair> sorted(std::vector<PersistencePair> v) {
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        return std::tie(a.dimension, a.birth, a.death) < std::tie(b.dimension, b.birth, b.death);
    });
    return v;
}

int betti_from_pairs(const std::vector<PersistencePair>& pairs, double eps, int r) {
    int n = 0;
    for (const auto& p : pairs)
        if (p.dimension == r && p.birth <= eps && eps < p.death) ++n;
    return n;
}

}  // namespace

TEST_SUITE("persistence") {

TEST_CASE("filtration of two points") {
    const auto dm = pairwise_distances(PointCloud::from_rows({{0.0}, {1.0}}));
    const auto f = build_rips_filtration(dm, 0);
    REQUIRE(f.size() == 3);
    CHECK(f.dimension(0) == 0);
    CHECK(f.radius(0) == 0.0);
    CHECK(f.dimension(1) == 0);
    CHECK(f.dimension(2) == 1);
    CHECK(f.radius(2) == 1.0);
}

TEST_CASE("filtration of the unit square") {
    const auto f = build_rips_filtration(square(), 1);
    std::map<std::pair<int, double>, int> count;
    for (std::size_t k = 0; k < f.size(); ++k) ++count[{f.dimension(k), f.radius(k)}];
    CHECK(count[{0, 0.0}] == 4);
    CHECK(count[{1, 1.0}] == 4);
    CHECK(count[{1, kSqrt2}] == 2);
    CHECK(count[{2, kSqrt2}] == 4);
    CHECK(f.size() == 14);

    const auto cut = build_rips_filtration(square(), 1, 1.2);
    CHECK(cut.size() == 8);
    for (std::size_t k = 0; k < cut.size(); ++k) CHECK(cut.radius(k) <= 1.2);
}

TEST_CASE("filtration order: radius, dimension, lexicographic; faces first") {
    Rng rng(5);
    const auto dm = pairwise_distances(testing::random_cloud(rng, 9));
    const auto f = build_rips_filtration(dm, 2);
    std::map<std::vector<std::uint32_t>, std::size_t> position;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const auto v = f.vertices(k);
        position[{v.begin(), v.end()}] = k;
        if (k > 0) {
            const auto prev = f.vertices(k - 1);
            const auto a = std::make_tuple(f.radius(k - 1), f.dimension(k - 1),
                                           std::vector<std::uint32_t>(prev.begin(), prev.end()));
            const auto b = std::make_tuple(f.radius(k), f.dimension(k), std::vector<std::uint32_t>(v.begin(), v.end()));
            CHECK(a < b);
        }
    }
    for (std::size_t k = 0; k < f.size(); ++k) {
        const auto v = f.vertices(k);
        if (v.size() < 2) continue;
        for (std::size_t drop = 0; drop < v.size(); ++drop) {
            std::vector<std::uint32_t> face;
            for (std::size_t i = 0; i < v.size(); ++i)
                if (i != drop) face.push_back(v[i]);
            REQUIRE(position.count(face));
            CHECK(position[face] < k);
        }
    }
}

TEST_CASE("simplex cap") {
    Rng rng(1);
    const auto dm = pairwise_distances(testing::random_cloud(rng, 30));
    CHECK_THROWS_AS(build_rips_filtration(dm, 2, kUnbounded, 100), ComputeError);
    CHECK_THROWS_AS(rips_persistence(dm, 2, kUnbounded, 100), ComputeError);
    CHECK_THROWS_AS(build_rips_filtration(dm, -1), InputError);
    CHECK_THROWS_AS(build_rips_filtration(dm, 1, -1.0), InputError);
}

TEST_CASE("persistence pairs by hand") {
    const auto two = pairwise_distances(PointCloud::from_rows({{0.0}, {1.0}}));
    const auto p2 = sorted(compute_persistence(build_rips_filtration(two, 0)));
    REQUIRE(p2.size() == 2);
    CHECK(p2[0] == PersistencePair{0, 0.0, 1.0});
    CHECK(p2[1].essential());
    CHECK(sorted(rips_persistence(two, 0)) == p2);

    for (const auto& pairs : {compute_persistence(build_rips_filtration(square(), 1)), rips_persistence(square(), 1)}) {
        const auto s = sorted(pairs);
        REQUIRE(s.size() == 5);
        for (int i = 0; i < 3; ++i) CHECK(s[i] == PersistencePair{0, 0.0, 1.0});
        CHECK(s[3].dimension == 0);
        CHECK(s[3].essential());
        CHECK(s[4].dimension == 1);
        CHECK(s[4].birth == 1.0);
        CHECK(std::abs(s[4].death - kSqrt2) <= 1e-12);
    }

    const auto line = pairwise_distances(PointCloud::from_rows({{0.0}, {1.0}, {2.0}}));
    for (const auto& pairs : {compute_persistence(build_rips_filtration(line, 1)), rips_persistence(line, 1)})
        for (const auto& p : pairs) CHECK(p.dimension == 0);
}

TEST_CASE("enclosing radius and default threshold") {
    CHECK(enclosing_radius(square()) == doctest::Approx(kSqrt2));
    // The H1 class of the square dies exactly at the enclosing radius.
    const auto pairs = rips_persistence(square(), 1, enclosing_radius(square()));
    const auto d = diagram_from_pairs(pairs, 1);
    REQUIRE(d.size() == 1);
    CHECK(std::abs(d[0].death - kSqrt2) <= 1e-12);
}

TEST_CASE("threshold below every edge leaves no H1") {
    const auto pairs = rips_persistence(square(), 1, 0.5);
    CHECK(diagram_from_pairs(pairs, 1).empty());
    CHECK(std::count_if(pairs.begin(), pairs.end(), [](const auto& p) { return p.essential(); }) == 4);
}

TEST_CASE("diagram_from_pairs policies") {
    const auto pairs = rips_persistence(square(), 1);
    const auto h1 = diagram_from_pairs(pairs, 1);
    REQUIRE(h1.size() == 1);
    CHECK(h1[0].birth == 1.0);
    const auto h0 = diagram_from_pairs(pairs, 0);
    CHECK(h0.size() == 3);
    for (const auto& p : h0.pairs()) CHECK(p == BirthDeath{0.0, 1.0});
    const auto capped = diagram_from_pairs(pairs, 0, EssentialPolicy::cap(10.0));
    CHECK(capped.size() == 4);
    CHECK(std::count(capped.pairs().begin(), capped.pairs().end(), BirthDeath{0.0, 10.0}) == 1);
    CHECK_THROWS_AS(diagram_from_pairs(pairs, 0, EssentialPolicy::cap(0.0)), InputError);
    CHECK_THROWS_AS(diagram_from_pairs(pairs, -1), InputError);
}

TEST_CASE("betti oracle by hand") {
    CHECK(betti_number_oracle(square(), 1.2, 1) == 1);
    CHECK(betti_number_oracle(square(), 1.5, 0) == 1);
    CHECK(betti_number_oracle(square(), 1.5, 1) == 0);
    CHECK(betti_number_oracle(square(), 0.0, 0) == 4);
    Rng rng(2);
    const auto dm = pairwise_distances(testing::random_cloud(rng, 7));
    CHECK(betti_number_oracle(dm, 0.0, 0) == 7);
    const auto big = pairwise_distances(testing::random_cloud(rng, kOracleMaxPoints + 1));
    CHECK_THROWS_AS(betti_number_oracle(big, 0.1, 0), InputError);
}

TEST_CASE("pairs agree with the rank oracle up to dimension 2") {
    Rng rng(20240611);
    for (int trial = 0; trial < 25; ++trial) {
        const auto n = 4 + rng.below(5);
        const auto dm = pairwise_distances(testing::random_cloud(rng, n, 2 + rng.below(2)));
        const auto generic = compute_persistence(build_rips_filtration(dm, 2));
        const auto fast = rips_persistence(dm, 1);
        std::set<double> radii{0.0};
        for (double v : dm.entries()) radii.insert(v);
        for (double c : radii) {
            for (double eps : {c - 1e-6, c, c + 1e-6}) {
                if (eps < 0) continue;
                for (int r = 0; r <= 2; ++r) {
                    const int oracle = betti_number_oracle(dm, eps, r);
                    CHECK(betti_from_pairs(generic, eps, r) == oracle);
                    if (r <= 1) CHECK(betti_from_pairs(fast, eps, r) == oracle);
                }
            }
        }
    }
}

TEST_CASE("cohomology and homology paths agree") {
    Rng rng(99);
    for (int trial = 0; trial < 15; ++trial) {
        const auto n = 10 + rng.below(25);
        const auto dm = pairwise_distances(testing::random_cloud(rng, n));
        const double t = trial % 3 == 0 ? kUnbounded : enclosing_radius(dm) * (0.4 + 0.6 * rng.uniform());
        const auto generic = sorted(compute_persistence(build_rips_filtration(dm, 1, t)));
        const auto fast = sorted(rips_persistence(dm, 1, t));
        CHECK(generic == fast);
    }
    // lattice points: many equal distances
    std::vector<std::vector<double>> grid;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) grid.push_back({double(i), double(j)});
    const auto dm = pairwise_distances(PointCloud::from_rows(grid));
    CHECK(sorted(compute_persistence(build_rips_filtration(dm, 1))) == sorted(rips_persistence(dm, 1)));
}

TEST_CASE("pairs do not depend on the order of equal-radius simplices") {
    Rng rng(7);
    std::vector<DistanceMatrix> inputs{square()};
    std::vector<std::vector<double>> grid;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) grid.push_back({double(i), double(j)});
    inputs.push_back(pairwise_distances(PointCloud::from_rows(grid)));
    for (const auto& dm : inputs) {
        const auto f = build_rips_filtration(dm, 1);
        const auto reference = sorted(compute_persistence(f));
        for (int trial = 0; trial < 10; ++trial) {
            // shuffle inside blocks of equal (radius, dimension) so faces stay first
            std::vector<std::size_t> order(f.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::size_t start = 0;
            while (start < order.size()) {
                std::size_t end = start;
                while (end < order.size() && f.radius(end) == f.radius(start) &&
                       f.dimension(end) == f.dimension(start))
                    ++end;
                std::vector<std::size_t> block(order.begin() + long(start), order.begin() + long(end));
                rng.shuffle(block);
                std::copy(block.begin(), block.end(), order.begin() + long(start));
                start = end;
            }
            CHECK(sorted(compute_persistence(reorder_filtration(f, order))) == reference);
        }
    }
}

TEST_CASE("reorder_filtration rejects cofaces before faces") {
    const auto f = build_rips_filtration(square(), 1);
    std::vector<std::size_t> order(f.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = f.size() - 1 - i;
    CHECK_THROWS_AS(reorder_filtration(f, order), InputError);
}

TEST_CASE("stability under small perturbations") {
    // Rips filtered by diameter: d_B <= 2 d_H with the Euclidean ground metric,
    // and the Euclidean Hausdorff distance is at most sqrt(2) times the max-norm one in the plane.
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = testing::random_cloud(rng, 6 + rng.below(10));
        std::vector<double> moved(x.coordinates().begin(), x.coordinates().end());
        const double h = 0.05 * rng.uniform();
        for (auto& v : moved) v += h * (2 * rng.uniform() - 1);
        const PointCloud y(moved, 2);
        const double dh = hausdorff_distance(x, y);
        const auto px = rips_persistence(pairwise_distances(x), 1);
        const auto py = rips_persistence(pairwise_distances(y), 1);
        for (int r = 0; r <= 1; ++r)
            CHECK(bottleneck_distance(diagram_from_pairs(px, r), diagram_from_pairs(py, r)) <=
                  2.0 * kSqrt2 * dh + 1e-9);
    }
}

TEST_CASE("diameter filtration: bottleneck can reach twice the Hausdorff distance") {
    const double h = 0.01;
    const auto x = PointCloud::from_rows({{0.0, 0.0}, {1.0, 0.0}});
    const auto y = PointCloud::from_rows({{-h, 0.0}, {1.0 + h, 0.0}});
    const auto dx = diagram_from_pairs(rips_persistence(pairwise_distances(x), 0), 0);
    const auto dy = diagram_from_pairs(rips_persistence(pairwise_distances(y), 0), 0);
    CHECK(hausdorff_distance(x, y) == doctest::Approx(h));
    CHECK(bottleneck_distance(dx, dy) == doctest::Approx(2 * h));
}
}

