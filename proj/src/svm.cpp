#include "vspk/svm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>

#include "vspk/error.hpp"
#include "vspk/random.hpp"

namespace vspk {

namespace {

constexpr double kTau = 1e-12;  // curvature floor for non-positive quadratic terms
constexpr double kInf = std::numeric_limits<double>::infinity();

bool in_up(int y, double a, double box) { return (y == 1 && a < box) || (y == -1 && a > 0.0); }
bool in_low(int y, double a, double box) { return (y == 1 && a > 0.0) || (y == -1 && a < box); }

}  // namespace

TrainedBinarySvm train_binary(const GramMatrix& k, std::span<const int> y, double box, SmoOptions options) {
    const std::size_t n = y.size();
    if (k.rows() != n || k.cols() != n) throw InputError("train_binary: Gram size does not match labels");
    if (!(box > 0.0)) throw InputError("train_binary: box must be positive");
    bool pos = false, neg = false;
    for (int v : y) {
        if (v != 1 && v != -1) throw InputError("train_binary: labels must be +1 or -1");
        (v == 1 ? pos : neg) = true;
    }
    if (!pos || !neg) throw ComputeError("train_binary: training labels contain a single class");

    TrainedBinarySvm m;
    // 2x2 principal minors catch the grossest departures from positive semidefiniteness.
    for (std::size_t i = 0; i < n && !m.psd_warning; ++i) {
        if (k(i, i) < -1e-12) m.psd_warning = true;
        for (std::size_t j = i + 1; j < n && !m.psd_warning; ++j)
            if (k(i, j) * k(i, j) > k(i, i) * k(j, j) * (1.0 + 1e-9) + 1e-12) m.psd_warning = true;
    }
    m.labels.assign(y.begin(), y.end());
    m.box = box;
    m.alpha.assign(n, 0.0);
    std::vector<double> grad(n, -1.0);
    auto q = [&](std::size_t i, std::size_t j) { return static_cast<double>(y[i] * y[j]) * k(i, j); };
    const std::size_t cap = options.max_iterations ? options.max_iterations : 1'000'000 * n;
    auto& alpha = m.alpha;

    while (m.iterations < cap) {
        // i: maximal violating index in I_up
        double gmax = -kInf;
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t)
            if (in_up(y[t], alpha[t], box) && -y[t] * grad[t] >= gmax) {
                if (-y[t] * grad[t] > gmax || i == n) i = t;
                gmax = std::max(gmax, -y[t] * grad[t]);
            }
        // j: second-order choice in I_low
        double gmax2 = -kInf, best_obj = kInf;
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (!in_low(y[t], alpha[t], box)) continue;
            gmax2 = std::max(gmax2, y[t] * grad[t]);
            if (i == n) continue;
            const double diff = gmax + y[t] * grad[t];
            if (diff <= 0.0) continue;
            double quad = k(i, i) + k(t, t) - 2.0 * k(i, t);
            if (quad <= 0.0) quad = kTau;
            const double obj = -diff * diff / quad;
            if (obj <= best_obj) {
                if (obj < best_obj || j == n) j = t;
                best_obj = std::min(best_obj, obj);
            }
        }
        if (i == n || j == n || gmax + gmax2 < options.tolerance) {
            m.converged = true;
            break;
        }
        ++m.iterations;

        const double old_i = alpha[i], old_j = alpha[j];
        if (y[i] != y[j]) {
            double quad = k(i, i) + k(j, j) + 2.0 * q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
            } else {
                if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = -diff; }
            }
            if (diff > 0.0) {
                if (alpha[i] > box) { alpha[i] = box; alpha[j] = box - diff; }
            } else {
                if (alpha[j] > box) { alpha[j] = box; alpha[i] = box + diff; }
            }
        } else {
            double quad = k(i, i) + k(j, j) - 2.0 * q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > box) {
                if (alpha[i] > box) { alpha[i] = box; alpha[j] = sum - box; }
            } else {
                if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = sum; }
            }
            if (sum > box) {
                if (alpha[j] > box) { alpha[j] = box; alpha[i] = sum - box; }
            } else {
                if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = sum; }
            }
        }
        const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t) grad[t] += q(t, i) * di + q(t, j) * dj;
    }

    // Bias from freshly accumulated outputs rather than the running gradient.
    std::vector<double> f(n, 0.0);
    for (std::size_t t = 0; t < n; ++t)
        if (alpha[t] > 0.0)
            for (std::size_t s = 0; s < n; ++s) f[s] += alpha[t] * y[t] * k(t, s);
    double free_sum = 0.0;
    std::size_t n_free = 0;
    double ub = kInf, lb = -kInf;
    for (std::size_t s = 0; s < n; ++s) {
        const double b_s = y[s] - f[s];
        if (alpha[s] > 0.0 && alpha[s] < box) {
            free_sum += b_s;
            ++n_free;
        } else if ((alpha[s] == 0.0) == (y[s] == 1)) {
            // b >= b_s keeps y_s h_s >= 1 (alpha = 0) or <= 1 (alpha = box)
            lb = std::max(lb, b_s);
        } else {
            ub = std::min(ub, b_s);
        }
    }
    if (n_free > 0)
        m.bias = free_sum / static_cast<double>(n_free);
    else if (std::isfinite(lb) && std::isfinite(ub))
        m.bias = 0.5 * (lb + ub);
    else
        m.bias = std::isfinite(lb) ? lb : ub;

    for (std::size_t s = 0; s < n; ++s)
        if (alpha[s] > 0.0) m.support.push_back(s);
    return m;
}

double decision_value(const TrainedBinarySvm& model, std::span<const double> k_row) {
    if (k_row.size() != model.alpha.size())
        throw InputError("decision_value: kernel row has length " + std::to_string(k_row.size()) + ", expected " +
                         std::to_string(model.alpha.size()));
    double h = model.bias;
    for (auto s : model.support) h += model.alpha[s] * model.labels[s] * k_row[s];
    return h;
}

OneVsRestSvm train_ovr(const GramMatrix& k, std::span<const int> labels, double box, SmoOptions options) {
    OneVsRestSvm m;
    const std::set<int> distinct(labels.begin(), labels.end());
    m.classes.assign(distinct.begin(), distinct.end());
    if (m.classes.size() < 2) throw ComputeError("train_ovr: need at least two classes");
    std::vector<int> y(labels.size());
    for (int c : m.classes) {
        for (std::size_t s = 0; s < labels.size(); ++s) y[s] = labels[s] == c ? 1 : -1;
        m.models.push_back(train_binary(k, y, box, options));
    }
    return m;
}

std::vector<double> ovr_decision_values(const OneVsRestSvm& model, std::span<const double> k_row) {
    std::vector<double> h;
    h.reserve(model.models.size());
    for (const auto& b : model.models) h.push_back(decision_value(b, k_row));
    return h;
}

int predict_ovr(const OneVsRestSvm& model, std::span<const double> k_row) {
    const auto h = ovr_decision_values(model, k_row);
    // Two classes: the first model's sign decides, matching binary classification.
    if (model.classes.size() == 2) return classify(h[0]) == 1 ? model.classes[0] : model.classes[1];
    std::size_t best = 0;
    for (std::size_t c = 1; c < h.size(); ++c)
        if (h[c] > h[best]) best = c;
    return model.classes[best];
}

std::vector<int> predict_ovr(const OneVsRestSvm& model, const GramMatrix& k_rows) {
    std::vector<int> out;
    out.reserve(k_rows.rows());
    for (std::size_t r = 0; r < k_rows.rows(); ++r) out.push_back(predict_ovr(model, k_rows.row(r)));
    return out;
}

namespace {

void check_score_input(std::span<const int> y_true, std::span<const int> y_pred) {
    if (y_true.empty()) throw InputError("scores: empty input");
    if (y_true.size() != y_pred.size()) throw InputError("scores: length mismatch");
}

double accuracy_of(std::span<const int> y_true, std::span<const int> y_pred) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) ok += y_true[i] == y_pred[i];
    return static_cast<double>(ok) / static_cast<double>(y_true.size());
}

double f1_of(std::span<const int> y_true, std::span<const int> y_pred, int positive) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool t = y_true[i] == positive, p = y_pred[i] == positive;
        tp += t && p;
        fp += !t && p;
        fn += t && !p;
    }
    if (tp == 0) return 0.0;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

Scores binary_scores(std::span<const int> y_true, std::span<const int> y_pred, int positive) {
    check_score_input(y_true, y_pred);
    return {accuracy_of(y_true, y_pred), f1_of(y_true, y_pred, positive)};
}

Scores multiclass_scores(std::span<const int> y_true, std::span<const int> y_pred, F1Average average) {
    check_score_input(y_true, y_pred);
    std::map<int, std::size_t> support;
    for (int c : y_true) ++support[c];
    double f1 = 0.0;
    for (const auto& [c, count] : support) {
        const double w = average == F1Average::macro ? 1.0 / static_cast<double>(support.size())
                                                     : static_cast<double>(count) / static_cast<double>(y_true.size());
        f1 += w * f1_of(y_true, y_pred, c);
    }
    return {accuracy_of(y_true, y_pred), f1};
}

Scores scores(std::span<const int> y_true, std::span<const int> y_pred) {
    check_score_input(y_true, y_pred);
    const auto is_sign = [](int v) { return v == 1 || v == -1; };
    if (std::all_of(y_true.begin(), y_true.end(), is_sign) && std::all_of(y_pred.begin(), y_pred.end(), is_sign))
        return binary_scores(y_true, y_pred, 1);
    return multiclass_scores(y_true, y_pred, F1Average::macro);
}

namespace {

std::map<int, std::vector<std::size_t>> members_by_class(std::span<const int> labels) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    return by_class;
}

}  // namespace

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, std::size_t n_folds,
                                                       std::uint64_t seed) {
    if (n_folds < 2) throw InputError("cross validation needs at least two folds");
    Rng rng(seed);
    std::vector<std::vector<std::size_t>> folds(n_folds);
    std::size_t next = 0;
    for (auto& [c, members] : members_by_class(labels)) {
        if (members.size() < n_folds)
            throw InputError("class " + std::to_string(c) + " has " + std::to_string(members.size()) +
                             " samples, fewer than the " + std::to_string(n_folds) + " folds");
        rng.shuffle(members);
        for (auto s : members) folds[next++ % n_folds].push_back(s);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

TrainTestSplit stratified_split(std::span<const int> labels, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InputError("split fraction must lie in (0,1)");
    Rng rng(seed);
    TrainTestSplit split;
    for (auto& [c, members] : members_by_class(labels)) {
        rng.shuffle(members);
        auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(members.size())));
        if (members.size() >= 2) n_train = std::clamp<std::size_t>(n_train, 1, members.size() - 1);
        split.train.insert(split.train.end(), members.begin(), members.begin() + static_cast<long>(n_train));
        split.test.insert(split.test.end(), members.begin() + static_cast<long>(n_train), members.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

CvReport cross_validate(const GramProducer& gram_for, const std::vector<std::string>& kernel_labels,
                        std::span<const double> boxes, std::span<const int> labels, std::size_t n_folds,
                        std::uint64_t seed, SmoOptions options) {
    if (kernel_labels.empty() || boxes.empty()) throw InputError("cross_validate: empty hyperparameter grid");
    const auto start = std::chrono::steady_clock::now();
    CvReport report;
    report.folds = stratified_folds(labels, n_folds, seed);

    // train indices of each fold
    std::vector<std::vector<std::size_t>> train(n_folds);
    for (std::size_t f = 0; f < n_folds; ++f) {
        std::vector<char> held(labels.size(), 0);
        for (auto s : report.folds[f]) held[s] = 1;
        for (std::size_t s = 0; s < labels.size(); ++s)
            if (!held[s]) train[f].push_back(s);
    }

    for (std::size_t kidx = 0; kidx < kernel_labels.size(); ++kidx) {
        const GramMatrix k = gram_for(kidx);
        if (k.rows() != labels.size() || k.cols() != labels.size())
            throw InputError("cross_validate: Gram size does not match labels");
        for (double box : boxes) {
            CvEntry e;
            e.kernel_index = kidx;
            e.kernel_label = kernel_labels[kidx];
            e.box = box;
            for (std::size_t f = 0; f < n_folds; ++f) {
                std::vector<int> y_train, y_test;
                for (auto s : train[f]) y_train.push_back(labels[s]);
                for (auto s : report.folds[f]) y_test.push_back(labels[s]);
                const auto model = train_ovr(k.submatrix(train[f], train[f]), y_train, box, options);
                const auto pred = predict_ovr(model, k.submatrix(report.folds[f], train[f]));
                const auto sc = scores(y_test, pred);
                e.fold_accuracy.push_back(sc.accuracy);
                e.fold_f1.push_back(sc.f1);
            }
            for (std::size_t f = 0; f < n_folds; ++f) {
                e.mean_accuracy += e.fold_accuracy[f] / static_cast<double>(n_folds);
                e.mean_f1 += e.fold_f1[f] / static_cast<double>(n_folds);
            }
            report.entries.push_back(std::move(e));
        }
    }

    for (std::size_t c = 1; c < report.entries.size(); ++c) {
        const auto& a = report.entries[c];
        const auto& b = report.entries[report.selected];
        if (a.mean_accuracy > b.mean_accuracy ||
            (a.mean_accuracy == b.mean_accuracy &&
             (a.box < b.box || (a.box == b.box && a.kernel_index < b.kernel_index))))
            report.selected = c;
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace vspk
