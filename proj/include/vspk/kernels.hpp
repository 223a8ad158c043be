#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vspk/diagram.hpp"
#include "vspk/gram.hpp"
#include "vspk/scaling.hpp"

namespace vspk {

// Persistence Scale Space kernel:
//   (1/(8 pi sigma)) sum_{y in D1, z in D2} exp(-|y-z|^2/(8 sigma)) - exp(-|y-zbar|^2/(8 sigma))
// with zbar = (death, birth). O(|D1||D2|); zero if either diagram is empty.
double pss_kernel(const PersistenceDiagram& a, const PersistenceDiagram& b, double sigma);

/// arctan(C * persistence^delta)
double arctan_weight(const BirthDeath& x, double c, int delta);

/// <E(D1), E(D2)> for the arctan-weighted Gaussian embedding with bandwidth rho_g.
double pwg_embedding_inner(const PersistenceDiagram& a, const PersistenceDiagram& b,
                           double gaussian_bandwidth, double c, int delta);

/// exp(-max(0, self_a + self_b - 2 cross) / (2 tau^2)).
double pwg_from_inners(double self_a, double self_b, double cross, double tau);

double pwg_kernel(const PersistenceDiagram& a, const PersistenceDiagram& b, double gaussian_bandwidth,
                  double c, int delta, double tau);

/// exp(-SW(D1, D2) / (2 sigma^2)).
double sw_kernel(const PersistenceDiagram& a, const PersistenceDiagram& b, double sigma, int n_slices);
double sw_from_distance(double sw_distance, double sigma);

struct PssParams {
    double sigma = 1.0;
    friend bool operator==(const PssParams&, const PssParams&) = default;
};

struct PwgParams {
    double gaussian_bandwidth = 1.0;
    double c = 1.0;
    int delta = 10;
    double tau = 1.0;
    friend bool operator==(const PwgParams&, const PwgParams&) = default;
};

struct SwParams {
    double sigma = 1.0;
    int n_slices = 10;
    friend bool operator==(const SwParams&, const SwParams&) = default;
};

enum class KernelKind { pss, pwg, sw };

std::string to_string(KernelKind k);
KernelKind parse_kernel_kind(const std::string& s);

/// A persistence kernel, optionally precomposed with a diagram scaling map.
class DiagramKernel {
public:
    using Params = std::variant<PssParams, PwgParams, SwParams>;

    /// InputError on non-positive parameters.
    explicit DiagramKernel(Params params, ScalingFunction scaling = ScalingFunction::none());

    static DiagramKernel pss(double sigma) { return DiagramKernel(PssParams{sigma}); }
    static DiagramKernel pwg(double gaussian_bandwidth, double c, int delta, double tau) {
        return DiagramKernel(PwgParams{gaussian_bandwidth, c, delta, tau});
    }
    static DiagramKernel sw(double sigma, int n_slices) { return DiagramKernel(SwParams{sigma, n_slices}); }

    KernelKind kind() const { return static_cast<KernelKind>(params_.index()); }
    const Params& params() const { return params_; }
    const ScalingFunction& scaling() const { return scaling_; }

    /// Kernel on unscaled diagrams, ignoring the scaling map.
    double base(const PersistenceDiagram& a, const PersistenceDiagram& b) const;

    /// base(scale(a), scale(b)).
    double operator()(const PersistenceDiagram& a, const PersistenceDiagram& b) const;

    DiagramKernel with_scaling(const ScalingFunction& s) const { return DiagramKernel(params_, s); }
    DiagramKernel without_scaling() const { return DiagramKernel(params_); }

    /// Short human-readable label, e.g. "PSS(sigma=0.1)".
    std::string describe() const;

private:
    Params params_;
    ScalingFunction scaling_;
};

/// Variably scaled persistence kernel: (a, b) -> base(s(a), s(b)). InputError
/// if `base` already carries a scaling map.
DiagramKernel make_vspk(const DiagramKernel& base, const ScalingFunction& s);

/// k(a,a) + k(b,b) - 2 k(a,b), clamped at zero (no square root).
double induced_distance(const DiagramKernel& k, const PersistenceDiagram& a, const PersistenceDiagram& b);

/// K[i][j] = k(D_i, D_j). The scaling map is applied once per diagram and
/// per-diagram caches are built before the cells are filled by `jobs` workers
/// (0 = hardware concurrency). ComputeError naming the pair on a non-finite value.
GramMatrix gram_matrix(const DiagramKernel& k, std::span<const PersistenceDiagram> diagrams, unsigned jobs = 0);

/// Median of the strictly positive entries (mean of the middle two for an even
/// count). InputError when there is none.
double median_heuristic(std::span<const double> values);

/// Pairwise Euclidean distances between all points pooled from the diagrams,
/// passed through median_heuristic. Default bandwidth for the PWG Gaussian.
double pooled_point_median(std::span<const PersistenceDiagram> diagrams);

/// Symmetric matrix of sliced Wasserstein distances.
GramMatrix sliced_wasserstein_matrix(std::span<const PersistenceDiagram> diagrams, int n_slices, unsigned jobs = 0);

}  // namespace vspk
