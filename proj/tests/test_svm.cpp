#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "support.hpp"
#include "vspk/error.hpp"
#include "vspk/svm.hpp"

using namespace vspk;

namespace {

GramMatrix linear_gram(const std::vector<std::vector<double>>& x) {
    GramMatrix k(x.size(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) {
            double s = 0.0;
            for (std::size_t d = 0; d < x[i].size(); ++d) s += x[i][d] * x[j][d];
            k(i, j) = s;
        }
    return k;
}

GramMatrix gaussian_gram(const std::vector<std::vector<double>>& x, double gamma) {
    GramMatrix k(x.size(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) {
            double s = 0.0;
            for (std::size_t d = 0; d < x[i].size(); ++d) s += (x[i][d] - x[j][d]) * (x[i][d] - x[j][d]);
            k(i, j) = std::exp(-gamma * s);
        }
    return k;
}

struct Problem {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
};

// Two Gaussian-ish blobs separated by a margin along a random direction.
Problem separable(Rng& rng, std::size_t n) {
    Problem p;
    const double angle = 2 * std::acos(-1.0) * rng.uniform();
    const double ux = std::cos(angle), uy = std::sin(angle);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i % 2 == 0 ? 1 : -1;
        const double along = label * (0.5 + rng.uniform());
        const double across = 2 * rng.uniform() - 1;
        p.x.push_back({along * ux - across * uy, along * uy + across * ux});
        p.y.push_back(label);
    }
    return p;
}

void check_invariants(const TrainedBinarySvm& m, const GramMatrix& k) {
    const std::size_t n = m.alpha.size();
    double balance = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(m.alpha[i] >= 0.0);
        CHECK(m.alpha[i] <= m.box);
        balance += m.alpha[i] * m.labels[i];
    }
    CHECK(std::abs(balance) <= 1e-6 * m.box * double(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double margin = m.labels[i] * decision_value(m, k.row(i));
        if (m.alpha[i] > 1e-8 * m.box && m.alpha[i] < m.box * (1 - 1e-8)) CHECK(std::abs(margin - 1.0) <= 1e-3);
        if (m.alpha[i] == 0.0) CHECK(margin >= 1.0 - 1e-3);
        if (m.alpha[i] == m.box) CHECK(margin <= 1.0 + 1e-3);
    }
}

}  // namespace

TEST_SUITE("svm") {

TEST_CASE("identity Gram by hand") {
    const GramMatrix k(2, 2, {1, 0, 0, 1});
    const std::vector<int> y{1, -1};
    const auto m = train_binary(k, y, 10.0);
    CHECK(m.alpha[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.alpha[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(m.bias) <= 1e-12);
    CHECK(m.converged);
    const std::vector<double> row{1, 0};
    CHECK(decision_value(m, row) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(classify(decision_value(m, k.row(0))) == 1);
    CHECK(classify(decision_value(m, k.row(1))) == -1);
    CHECK(classify(0.0) == 1);
    CHECK_THROWS_AS(decision_value(m, std::vector<double>{1, 0, 0}), InputError);
}

TEST_CASE("a flipped duplicate is bounded by the box") {
    const std::vector<std::vector<double>> x{{1, 0}, {-1, 0}, {1.2, 0.3}, {-1.1, -0.2}, {1, 0}};
    const std::vector<int> y{1, -1, 1, -1, -1};
    const auto k = linear_gram(x);
    const double box = 0.1;
    const auto m = train_binary(k, y, box);
    CHECK(m.alpha[4] == doctest::Approx(box).epsilon(1e-12));
    check_invariants(m, k);
}

TEST_CASE("single class and size mismatches") {
    const GramMatrix k(2, 2, {1, 0, 0, 1});
    CHECK_THROWS_AS(train_binary(k, std::vector<int>{1, 1}, 1.0), ComputeError);
    CHECK_THROWS_AS(train_binary(k, std::vector<int>{1, -1, 1}, 1.0), InputError);
    CHECK_THROWS_AS(train_binary(k, std::vector<int>{1, 2}, 1.0), InputError);
    CHECK_THROWS_AS(train_binary(k, std::vector<int>{1, -1}, 0.0), InputError);
    CHECK_THROWS_AS(train_ovr(k, std::vector<int>{3, 3}, 1.0), ComputeError);
}

TEST_CASE("separable problems with a large box are fit exactly") {
    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = separable(rng, 20 + rng.below(30));
        const auto k = trial % 2 ? linear_gram(p.x) : gaussian_gram(p.x, 0.5);
        const auto m = train_binary(k, p.y, 1e3);
        CHECK(m.converged);
        CHECK_FALSE(m.psd_warning);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < p.y.size(); ++i) correct += classify(decision_value(m, k.row(i))) == p.y[i];
        CHECK(correct == p.y.size());
        check_invariants(m, k);
    }
}

TEST_CASE("KKT invariants on noisy problems") {
    Rng rng(202);
    for (int trial = 0; trial < 10; ++trial) {
        auto p = separable(rng, 40);
        for (auto& l : p.y)
            if (rng.uniform() < 0.15) l = -l;
        if (std::all_of(p.y.begin(), p.y.end(), [&](int v) { return v == p.y[0]; })) continue;
        const auto k = gaussian_gram(p.x, 1.0);
        for (double box : {0.01, 1.0, 100.0}) {
            const auto m = train_binary(k, p.y, box);
            CHECK(m.converged);
            check_invariants(m, k);
        }
    }
}

TEST_CASE("indefinite Gram matrices raise the PSD warning") {
    const GramMatrix k(2, 2, {1, 3, 3, 1});
    const auto m = train_binary(k, std::vector<int>{1, -1}, 1.0);
    CHECK(m.psd_warning);
}

TEST_CASE("permuting the training set permutes the model") {
    Rng rng(303);
    const auto p = separable(rng, 30);
    const auto k = gaussian_gram(p.x, 0.8);
    std::vector<int> labels;
    for (std::size_t i = 0; i < p.y.size(); ++i) labels.push_back(int(i % 3));
    std::vector<std::size_t> perm(p.y.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    rng.shuffle(perm);
    std::vector<int> permuted_labels;
    for (auto i : perm) permuted_labels.push_back(labels[i]);
    const auto a = train_ovr(k, labels, 1.0);
    const auto b = train_ovr(k.submatrix(perm, perm), permuted_labels, 1.0);
    const auto pa = predict_ovr(a, k);
    std::vector<std::size_t> all(perm.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto pb = predict_ovr(b, k.submatrix(all, perm));
    CHECK(pa == pb);
}

TEST_CASE("test rows never influence training") {
    Rng rng(404);
    const auto p = separable(rng, 24);
    auto k = gaussian_gram(p.x, 0.8);
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < 24; ++i) (i < 18 ? train : test).push_back(i);
    std::vector<int> y;
    for (auto i : train) y.push_back(p.y[i]);
    const auto before = train_binary(k.submatrix(train, train), y, 1.0);
    k(20, 3) = k(3, 20) = 123.0;
    const auto after = train_binary(k.submatrix(train, train), y, 1.0);
    CHECK(before.alpha == after.alpha);
    CHECK(before.bias == after.bias);
}

TEST_CASE("one-vs-rest") {
    Rng rng(505);
    const auto p = separable(rng, 30);
    const auto k = gaussian_gram(p.x, 0.5);
    std::vector<int> two;
    for (int l : p.y) two.push_back(l == 1 ? 0 : 1);
    const auto ovr = train_ovr(k, two, 1.0);
    REQUIRE(ovr.classes == std::vector<int>{0, 1});
    for (std::size_t i = 0; i < two.size(); ++i) {
        const int from_binary = classify(decision_value(ovr.models[0], k.row(i))) == 1 ? 0 : 1;
        CHECK(predict_ovr(ovr, k.row(i)) == from_binary);
    }

    std::vector<int> five;
    for (std::size_t i = 0; i < 30; ++i) five.push_back(int(i % 5) * 10);
    const auto m5 = train_ovr(k, five, 1.0);
    const std::set<int> classes(five.begin(), five.end());
    for (int c : predict_ovr(m5, k)) CHECK(classes.count(c) == 1);

    const GramMatrix constant(6, 6, std::vector<double>(36, 1.0));
    const std::vector<int> y3{2, 0, 1, 0, 1, 2};
    const auto flat = train_ovr(constant, y3, 1.0);
    const auto dv = ovr_decision_values(flat, constant.row(0));
    CHECK(dv[0] == doctest::Approx(dv[1]));
    CHECK(dv[1] == doctest::Approx(dv[2]));
    for (int c : predict_ovr(flat, constant)) CHECK(c == 0);
}

TEST_CASE("scores by hand") {
    const std::vector<int> t{1, 1, -1, -1, -1, -1};
    const std::vector<int> p{1, 1, 1, -1, -1, -1};
    const auto s = scores(t, p);
    CHECK(s.accuracy == doctest::Approx(5.0 / 6.0));
    CHECK(s.f1 == doctest::Approx(0.8));
    const auto perfect = scores(t, t);
    CHECK(perfect.accuracy == 1.0);
    CHECK(perfect.f1 == 1.0);
    const std::vector<int> bal{1, 1, -1, -1}, all_neg{-1, -1, -1, -1};
    CHECK(scores(bal, all_neg).accuracy == 0.5);
    CHECK_THROWS_AS(scores(std::vector<int>{}, std::vector<int>{}), InputError);
    CHECK_THROWS_AS(scores(t, bal), InputError);
}

TEST_CASE("multiclass f1") {
    const std::vector<int> t{0, 0, 1, 1, 2, 2};
    const std::vector<int> p{0, 0, 1, 0, 1, 1};
    const auto macro = multiclass_scores(t, p);
    // class 0: P=2/3 R=1 f1=0.8; class 1: P=1/3 R=1/2 f1=0.4; class 2: f1=0
    CHECK(macro.accuracy == doctest::Approx(0.5));
    CHECK(macro.f1 == doctest::Approx((0.8 + 0.4 + 0.0) / 3));
    const auto weighted = multiclass_scores(t, p, F1Average::weighted);
    CHECK(weighted.f1 == doctest::Approx((0.8 + 0.4 + 0.0) / 3));
    CHECK(scores(t, p).f1 == macro.f1);
}

TEST_CASE("stratified folds and split") {
    std::vector<int> labels;
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 10 + c; ++i) labels.push_back(c);
    const auto folds = stratified_folds(labels, 5, 7);
    REQUIRE(folds.size() == 5);
    std::vector<int> seen(labels.size(), 0);
    for (const auto& f : folds) {
        std::map<int, int> per_class;
        for (auto i : f) {
            ++seen[i];
            ++per_class[labels[i]];
        }
        for (int c = 0; c < 3; ++c) CHECK(per_class[c] >= 2);
    }
    for (int s : seen) CHECK(s == 1);
    CHECK(stratified_folds(labels, 5, 7) == folds);
    CHECK_FALSE(stratified_folds(labels, 5, 8) == folds);
    CHECK_THROWS_AS(stratified_folds(labels, 11, 7), InputError);
    CHECK_THROWS_AS(stratified_folds(labels, 1, 7), InputError);

    const auto split = stratified_split(labels, 0.7, 3);
    CHECK(split.train.size() + split.test.size() == labels.size());
    std::map<int, int> train_count;
    for (auto i : split.train) ++train_count[labels[i]];
    CHECK(train_count[0] == 7);
    CHECK(train_count[1] == 8);
    CHECK(train_count[2] == 8);
    CHECK_THROWS_AS(stratified_split(labels, 1.0, 3), InputError);
}

TEST_CASE("cross validation grid search") {
    Rng rng(606);
    const auto p = separable(rng, 40);
    std::vector<int> y = p.y;
    const auto good = gaussian_gram(p.x, 0.5);
    const GramMatrix useless(40, 40, std::vector<double>(1600, 1.0));

    const std::vector<double> one_box{1.0};
    const auto single = cross_validate([&](std::size_t) { return good; }, {"good"}, one_box, y, 5, 1);
    REQUIRE(single.entries.size() == 1);
    CHECK(single.best().kernel_label == "good");
    CHECK(single.best().fold_accuracy.size() == 5);
    CHECK(single.seconds >= 0.0);

    const auto dominance = cross_validate([&](std::size_t i) { return i == 0 ? useless : good; },
                                          {"useless", "good"}, one_box, y, 5, 1);
    CHECK(dominance.best().kernel_label == "good");

    const std::vector<double> boxes{10.0, 1.0, 100.0};
    const auto tie = cross_validate([&](std::size_t) { return good; }, {"first", "second"}, boxes, y, 5, 1);
    CHECK(tie.entries.size() == 6);
    CHECK(tie.best().box == 1.0);
    CHECK(tie.best().kernel_label == "first");
}

}
