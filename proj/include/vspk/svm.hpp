#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vspk/gram.hpp"

namespace vspk {

struct SmoOptions {
    /// Stop when the maximal KKT violation m(alpha) - M(alpha) drops below this.
    double tolerance = 1e-3;
    /// 0 selects 10^6 * n.
    std::size_t max_iterations = 0;
};

/// Soft-margin binary SVM trained on a precomputed Gram matrix.
struct TrainedBinarySvm {
    std::vector<double> alpha;
    std::vector<int> labels;  // +1 / -1
    double bias = 0.0;
    double box = 0.0;
    std::vector<std::size_t> support;
    std::size_t iterations = 0;
    bool converged = false;
    /// Set when the Gram matrix fails a cheap PSD screen; training still runs.
    bool psd_warning = false;
};

/// Solves the box-constrained dual
///   min 1/2 a^T Q a - 1^T a,  y^T a = 0,  0 <= a_i <= box,  Q_ij = y_i y_j K_ij
/// by SMO with second-order working-set selection. The bias is the mean of
/// y_j - sum_i a_i y_i K_ij over free vectors, else the midpoint of the feasible
/// interval. ComputeError if `y` has a single class.
TrainedBinarySvm train_binary(const GramMatrix& k, std::span<const int> y, double box, SmoOptions options = {});

/// sum_i alpha_i y_i k_row[i] + b. InputError on a length mismatch.
double decision_value(const TrainedBinarySvm& model, std::span<const double> k_row);

/// sign with h = 0 mapped to +1.
inline int classify(double h) { return h >= 0.0 ? 1 : -1; }

struct OneVsRestSvm {
    std::vector<int> classes;  // ascending
    std::vector<TrainedBinarySvm> models;
};

/// One binary model per class (class = +1, rest = -1). ComputeError with fewer
/// than two classes.
OneVsRestSvm train_ovr(const GramMatrix& k, std::span<const int> labels, double box, SmoOptions options = {});

std::vector<double> ovr_decision_values(const OneVsRestSvm& model, std::span<const double> k_row);

/// Argmax of the per-class decision values; ties go to the earlier class.
int predict_ovr(const OneVsRestSvm& model, std::span<const double> k_row);

/// One prediction per row of a (test x train) kernel block.
std::vector<int> predict_ovr(const OneVsRestSvm& model, const GramMatrix& k_rows);

struct Scores {
    double accuracy = 0.0;
    double f1 = 0.0;
};

enum class F1Average { macro, weighted };

/// Binary accuracy and f1 of the `positive` class.
Scores binary_scores(std::span<const int> y_true, std::span<const int> y_pred, int positive = 1);

/// Accuracy and per-class one-vs-rest f1 averaged over the classes of y_true.
/// A class with no true positive contributes f1 = 0.
Scores multiclass_scores(std::span<const int> y_true, std::span<const int> y_pred,
                         F1Average average = F1Average::macro);

/// binary_scores when every label is +1 or -1, multiclass (macro) otherwise.
/// InputError on empty or mismatched input.
Scores scores(std::span<const int> y_true, std::span<const int> y_pred);

/// Stratified k-fold assignment: returns the held-out indices of each fold.
/// InputError when a class has fewer members than folds.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, std::size_t n_folds,
                                                       std::uint64_t seed);

struct TrainTestSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Stratified split; each class contributes round(fraction * count) samples to
/// the training part, clamped so both parts keep at least one member when the
/// class has two or more.
TrainTestSplit stratified_split(std::span<const int> labels, double train_fraction, std::uint64_t seed);

struct CvEntry {
    std::size_t kernel_index = 0;
    std::string kernel_label;
    double box = 0.0;
    std::vector<double> fold_accuracy;
    std::vector<double> fold_f1;
    double mean_accuracy = 0.0;
    double mean_f1 = 0.0;
};

struct CvReport {
    std::vector<CvEntry> entries;  // kernel-major, box-minor grid order
    std::size_t selected = 0;      // index into entries
    double seconds = 0.0;          // wall clock, including Gram construction
    std::vector<std::vector<std::size_t>> folds;

    const CvEntry& best() const { return entries.at(selected); }
};

/// Produces the Gram matrix over the CV samples for one kernel grid point.
using GramProducer = std::function<GramMatrix(std::size_t kernel_index)>;

/// Grid search over kernel_labels.size() kernel settings x boxes with stratified
/// k-fold CV, scoring held-out folds on the sub-Gram. Selects the maximal mean
/// accuracy; ties go to the smaller box, then to the earlier kernel setting.
CvReport cross_validate(const GramProducer& gram_for, const std::vector<std::string>& kernel_labels,
                        std::span<const double> boxes, std::span<const int> labels, std::size_t n_folds,
                        std::uint64_t seed, SmoOptions options = {});

}  // namespace vspk
