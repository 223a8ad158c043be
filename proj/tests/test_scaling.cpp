#include <doctest.h>

#include "support.hpp"
#include "vspk/error.hpp"
#include "vspk/kernels.hpp"
#include "vspk/scaling.hpp"

using namespace vspk;

namespace {

PersistenceDiagram dgm(std::vector<BirthDeath> pairs) { return PersistenceDiagram(1, std::move(pairs)); }

}  // namespace

TEST_SUITE("vspk") {

TEST_CASE("centre of uniform mass") {
    CHECK(centre_of_uniform_mass(dgm({{0, 2}})) == BirthDeath{0, 2});
    CHECK(centre_of_uniform_mass(dgm({{0, 2}, {1, 3}})) == BirthDeath{0.5, 2.5});
    CHECK(centre_of_uniform_mass(dgm({{0, 1}, {0, 1}, {3, 4}})) == BirthDeath{1, 2});
    CHECK_FALSE(centre_of_uniform_mass(dgm({})).has_value());
}

TEST_CASE("centre of persistence") {
    CHECK(centre_of_persistence(dgm({{0, 2}})) == BirthDeath{0, 2});
    CHECK(centre_of_persistence(dgm({{0, 1}, {0, 3}})) == BirthDeath{0, 2.5});
    CHECK(centre_of_persistence(dgm({{0, 2}, {1, 3}})) == BirthDeath{0.5, 2.5});
    CHECK_FALSE(centre_of_persistence(dgm({})).has_value());
}

TEST_CASE("centres lie above the diagonal; equal persistences give equal centres") {
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = testing::random_diagram(rng, 12, 2.0, 1);
        for (auto kind : {CentreKind::uniform_mass, CentreKind::persistence_weighted}) {
            const auto c = centre(d, kind);
            REQUIRE(c.has_value());
            CHECK(c->death > c->birth);
        }
        std::vector<BirthDeath> same;
        for (const auto& p : d.pairs()) same.push_back({p.birth, p.birth + 0.75});
        const auto e = dgm(same);
        const auto c1 = *centre_of_uniform_mass(e), c2 = *centre_of_persistence(e);
        CHECK(c1.birth == doctest::Approx(c2.birth).epsilon(1e-14));
        CHECK(c1.death == doctest::Approx(c2.death).epsilon(1e-14));
    }
}

TEST_CASE("augment") {
    const auto s = ScalingFunction::augment(CentreKind::persistence_weighted);
    CHECK(apply_scaling(dgm({{0, 1}, {0, 3}}), s) == dgm({{0, 1}, {0, 3}, {0, 2.5}}));
    CHECK(apply_scaling(dgm({}), s).empty());
    CHECK(apply_scaling(dgm({{0, 2}}), ScalingFunction::augment(CentreKind::uniform_mass)) == dgm({{0, 2}, {0, 2}}));
}

TEST_CASE("compress") {
    const auto s = ScalingFunction::compress(2, CentreKind::persistence_weighted);
    CHECK(apply_scaling(dgm({{0, 5}, {0, 3}, {0, 1}, {1, 2}}), s) == dgm({{0, 5}, {0, 3}, {0.5, 1.5}}));
    const auto small = dgm({{0, 1}, {0.2, 0.4}});
    CHECK(apply_scaling(small, ScalingFunction::compress(10, CentreKind::uniform_mass)) == small);
    CHECK(apply_scaling(dgm({}), s).empty());
    CHECK_THROWS_AS(ScalingFunction::compress(0, CentreKind::uniform_mass), InputError);
}

TEST_CASE("compress keeps kept points in input order and breaks ties by birth") {
    // persistences: 1, 2, 1, 2 ; rho = 1 keeps the tie winner with the smaller birth (index 3)
    const auto d = dgm({{0, 1}, {0.5, 2.5}, {2, 3}, {0.25, 2.25}});
    const auto out = apply_scaling(d, ScalingFunction::compress(1, CentreKind::uniform_mass));
    REQUIRE(out.size() == 2);
    CHECK(out[0] == BirthDeath{0.25, 2.25});
    const auto rest = *centre_of_uniform_mass(dgm({{0, 1}, {0.5, 2.5}, {2, 3}}));
    CHECK(out[1] == rest);

    const auto two = apply_scaling(d, ScalingFunction::compress(2, CentreKind::uniform_mass));
    REQUIRE(two.size() == 3);
    CHECK(two[0] == BirthDeath{0.5, 2.5});
    CHECK(two[1] == BirthDeath{0.25, 2.25});
}

TEST_CASE("compress output size") {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = testing::random_diagram(rng, 20);
        const int rho = 1 + static_cast<int>(rng.below(12));
        const auto out = apply_scaling(d, ScalingFunction::compress(rho, CentreKind::persistence_weighted));
        const std::size_t expected = d.size() > std::size_t(rho) ? std::size_t(rho) + 1 : d.size();
        CHECK(out.size() == expected);
    }
}

TEST_CASE("make_vspk evaluates the base kernel on scaled diagrams") {
    Rng rng(12);
    const auto base = DiagramKernel::pss(0.3);
    const ScalingFunction maps[] = {ScalingFunction::augment(CentreKind::uniform_mass),
                                    ScalingFunction::augment(CentreKind::persistence_weighted),
                                    ScalingFunction::compress(3, CentreKind::uniform_mass),
                                    ScalingFunction::compress(3, CentreKind::persistence_weighted)};
    for (const auto& s : maps) {
        const auto k = make_vspk(base, s);
        for (int trial = 0; trial < 10; ++trial) {
            const auto a = testing::random_diagram(rng, 8);
            const auto b = testing::random_diagram(rng, 8);
            CHECK(k(a, b) == base(apply_scaling(a, s), apply_scaling(b, s)));
            CHECK(k(a, a) == base(apply_scaling(a, s), apply_scaling(a, s)));
        }
    }
    const auto a = testing::random_diagram(rng, 5);
    const auto b = testing::random_diagram(rng, 5);
    CHECK(make_vspk(base, ScalingFunction::compress(5, CentreKind::uniform_mass))(a, b) == base(a, b));
    CHECK_THROWS_AS(make_vspk(make_vspk(base, maps[0]), maps[1]), InputError);
}

TEST_CASE("scaling names") {
    CHECK(parse_scaling_variant("compress") == ScalingVariant::compress);
    CHECK(parse_centre_kind("mass") == CentreKind::uniform_mass);
    CHECK(to_string(ScalingVariant::augment) == "augment");
    CHECK_THROWS_AS(parse_scaling_variant("shrink"), InputError);
    CHECK_THROWS_AS(parse_centre_kind("median"), InputError);
}

}
