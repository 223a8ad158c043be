#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "vspk/diagram.hpp"
#include "vspk/error.hpp"

using namespace vspk;

namespace {

PersistenceDiagram dgm(std::vector<BirthDeath> pairs) { return PersistenceDiagram(1, std::move(pairs)); }

}  // namespace

TEST_SUITE("diagram") {

TEST_CASE("persistence of a pair") {
    CHECK(persistence({0, 1}) == 1.0);
    CHECK(persistence({1, std::sqrt(2.0)}) == std::sqrt(2.0) - 1.0);
    CHECK(persistence({2.5, 2.5 + 1e-9}) == doctest::Approx(1e-9).epsilon(1e-6));
}

TEST_CASE("diagram validation") {
    CHECK_THROWS_AS(dgm({{1, 1}}), InputError);
    CHECK_THROWS_AS(dgm({{2, 1}}), InputError);
    CHECK_THROWS_AS(dgm({{-1, 1}}), InputError);
    CHECK_THROWS_AS(dgm({{0, INFINITY}}), InputError);
    CHECK_THROWS_AS(dgm({{NAN, 1}}), InputError);
    CHECK_NOTHROW(dgm({{0, 1}, {0, 1}}));
}

TEST_CASE("bottleneck by hand") {
    const auto a = dgm({{0, 2}});
    CHECK(bottleneck_distance(a, a) == 0.0);
    CHECK(bottleneck_distance(a, dgm({})) == 1.0);
    CHECK(bottleneck_distance(a, dgm({{0, 2}, {0, 0.1}})) == doctest::Approx(0.05));
    CHECK(bottleneck_distance(dgm({}), dgm({})) == 0.0);
    CHECK_THROWS_AS(bottleneck_distance(a, PersistenceDiagram(0, {{0, 2}})), InputError);
}

TEST_CASE("wasserstein by hand") {
    const auto a = dgm({{0, 2}});
    CHECK(wasserstein_distance(a, a, 1) == 0.0);
    CHECK(wasserstein_distance(a, dgm({}), 1) == 1.0);
    CHECK(wasserstein_distance(a, dgm({{0, 4}}), 1) == 2.0);
    CHECK(wasserstein_distance(a, dgm({{0, 4}}), 2) == doctest::Approx(2.0));
    CHECK_THROWS_AS(wasserstein_distance(a, a, 0.5), InputError);
    CHECK_THROWS_AS(wasserstein_distance(a, a, INFINITY), InputError);
}

TEST_CASE("sliced wasserstein by hand") {
    const auto a = dgm({{0, 2}});
    CHECK(sliced_wasserstein_distance(a, a, 10) == 0.0);
    double previous = INFINITY;
    for (double death : {2.0, 1.0, 0.5, 0.1, 0.01}) {
        const double v = sliced_wasserstein_distance(dgm({{0, death}}), dgm({}), 10);
        CHECK(v > 0.0);
        CHECK(v < previous);
        previous = v;
    }
    const double coarse = sliced_wasserstein_distance(a, dgm({{0, 4}}), 10);
    const double dense = sliced_wasserstein_distance(a, dgm({{0, 4}}), 10000);
    CHECK(coarse == doctest::Approx(1.5501842530580592).epsilon(1e-12));
    // Ten midpoint directions undershoot this pair by about 2.4%.
    CHECK(std::abs(coarse - dense) <= 0.025 * dense);
    CHECK(std::abs(sliced_wasserstein_distance(a, dgm({{0, 4}}), 20) - dense) <= 0.02 * dense);
    CHECK_THROWS_AS(sliced_wasserstein_distance(a, a, 0), InputError);
}

TEST_CASE("exact metrics match brute-force matchings") {
    Rng rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        const auto a = testing::random_diagram(rng, 4);
        const auto b = testing::random_diagram(rng, 4);
        CHECK(bottleneck_distance(a, b) == doctest::Approx(testing::brute_force_matching(a, b, 0)).epsilon(1e-12));
        for (double p : {1.0, 2.0, 3.5})
            CHECK(wasserstein_distance(a, b, p) ==
                  doctest::Approx(testing::brute_force_matching(a, b, p)).epsilon(1e-10));
    }
}

TEST_CASE("metric properties on random diagrams") {
    Rng rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        const auto a = testing::random_diagram(rng, 8);
        const auto b = testing::random_diagram(rng, 8);
        const auto c = testing::random_diagram(rng, 8);
        CHECK(bottleneck_distance(a, b) == bottleneck_distance(b, a));
        CHECK(wasserstein_distance(a, b, 1) == doctest::Approx(wasserstein_distance(b, a, 1)));
        CHECK(sliced_wasserstein_distance(a, b, 10) == doctest::Approx(sliced_wasserstein_distance(b, a, 10)));
        CHECK(bottleneck_distance(a, a) == 0.0);
        CHECK(wasserstein_distance(a, a, 2) == 0.0);
        CHECK(sliced_wasserstein_distance(a, a, 10) == 0.0);
        CHECK(bottleneck_distance(a, c) <= bottleneck_distance(a, b) + bottleneck_distance(b, c) + 1e-9);
        CHECK(wasserstein_distance(a, b, 1) >= bottleneck_distance(a, b) - 1e-12);
    }
}

TEST_CASE("large p approaches the bottleneck distance") {
    Rng rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        const auto a = testing::random_diagram(rng, 5, 1.0, 1);
        const auto b = testing::random_diagram(rng, 5, 1.0, 1);
        const double db = bottleneck_distance(a, b);
        CHECK(std::abs(wasserstein_distance(a, b, 64) - db) <= 0.05 * db);
    }
}

TEST_CASE("sliced wasserstein: dense reference and W1 bound") {
    Rng rng(41);
    const double bound = 2.0 * std::sqrt(2.0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto a = testing::random_diagram(rng, 6);
        const auto b = testing::random_diagram(rng, 6);
        const double reference = testing::dense_sliced_wasserstein(a, b, 20000);
        CHECK(sliced_wasserstein_distance(a, b, 10000) == doctest::Approx(reference).epsilon(1e-3));
        CHECK(reference <= bound * wasserstein_distance(a, b, 1) + 1e-9);
        if (!(a == b) && (a.size() + b.size()) > 0) CHECK(reference > 0.0);
    }
}

TEST_CASE("persistence order and top-k") {
    const auto d = dgm({{0, 1}, {0, 3}, {1, 2}, {0.5, 3.5}, {0, 1}});
    const auto order = persistence_order(d);
    CHECK(order == std::vector<std::size_t>{1, 3, 0, 4, 2});
    const auto top = top_k_persistent(d, 3);
    CHECK(top == dgm({{0, 1}, {0, 3}, {0.5, 3.5}}));
    CHECK(top_k_persistent(d, 10) == d);
    CHECK(top_k_persistent(d, 0).empty());
}

}
