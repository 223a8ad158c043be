#include "vspk/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "parallel.hpp"
#include "vspk/error.hpp"

namespace vspk {

GramMatrix::GramMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), v_(std::move(values)) {
    if (v_.size() != rows_ * cols_) throw InputError("Gram matrix buffer has the wrong size");
}

GramMatrix GramMatrix::submatrix(std::span<const std::size_t> rows, std::span<const std::size_t> cols) const {
    GramMatrix out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = (*this)(rows[i], cols[j]);
    return out;
}

namespace {

// Double sums are accumulated in a canonical argument order so that swapping
// the arguments gives a bit-identical value.
bool in_canonical_order(const PersistenceDiagram& a, const PersistenceDiagram& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    const auto pa = a.pairs(), pb = b.pairs();
    return !std::lexicographical_compare(pb.begin(), pb.end(), pa.begin(), pa.end(),
                                         [](const BirthDeath& x, const BirthDeath& y) {
                                             return x.birth != y.birth ? x.birth < y.birth : x.death < y.death;
                                         });
}

}  // namespace

double pss_kernel(const PersistenceDiagram& a, const PersistenceDiagram& b, double sigma) {
    if (!(sigma > 0.0)) throw InputError("PSS sigma must be positive");
    if (!in_canonical_order(a, b)) return pss_kernel(b, a, sigma);
    const double scale = 8.0 * sigma;
    double sum = 0.0;
    for (const auto& y : a.pairs()) {
        for (const auto& z : b.pairs()) {
            const double db = y.birth - z.birth, dd = y.death - z.death;
            const double mb = y.birth - z.death, md = y.death - z.birth;
            sum += std::exp(-(db * db + dd * dd) / scale) - std::exp(-(mb * mb + md * md) / scale);
        }
    }
    return sum / (8.0 * std::numbers::pi * sigma);
}

double arctan_weight(const BirthDeath& x, double c, int delta) {
    return std::atan(c * std::pow(persistence(x), delta));
}

namespace {

double pwg_inner_weighted(const PersistenceDiagram& a, std::span<const double> wa, const PersistenceDiagram& b,
                          std::span<const double> wb, double gaussian_bandwidth) {
    if (!in_canonical_order(a, b)) return pwg_inner_weighted(b, wb, a, wa, gaussian_bandwidth);
    const double denom = 2.0 * gaussian_bandwidth * gaussian_bandwidth;
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double db = a[i].birth - b[j].birth, dd = a[i].death - b[j].death;
            sum += wa[i] * wb[j] * std::exp(-(db * db + dd * dd) / denom);
        }
    }
    return sum;
}

std::vector<double> arctan_weights(const PersistenceDiagram& d, double c, int delta) {
    std::vector<double> w;
    w.reserve(d.size());
    for (const auto& x : d.pairs()) w.push_back(arctan_weight(x, c, delta));
    return w;
}

void check_pwg(double gaussian_bandwidth, double c, int delta) {
    if (!(gaussian_bandwidth > 0.0)) throw InputError("PWG Gaussian bandwidth must be positive");
    if (!(c > 0.0)) throw InputError("PWG C must be positive");
    if (delta < 1) throw InputError("PWG delta must be a positive integer");
}

}  // namespace

double pwg_embedding_inner(const PersistenceDiagram& a, const PersistenceDiagram& b, double gaussian_bandwidth,
                           double c, int delta) {
    check_pwg(gaussian_bandwidth, c, delta);
    return pwg_inner_weighted(a, arctan_weights(a, c, delta), b, arctan_weights(b, c, delta), gaussian_bandwidth);
}

double pwg_from_inners(double self_a, double self_b, double cross, double tau) {
    const double sq = std::max(0.0, self_a + self_b - 2.0 * cross);
    return std::exp(-sq / (2.0 * tau * tau));
}

double pwg_kernel(const PersistenceDiagram& a, const PersistenceDiagram& b, double gaussian_bandwidth, double c,
                  int delta, double tau) {
    check_pwg(gaussian_bandwidth, c, delta);
    if (!(tau > 0.0)) throw InputError("PWG tau must be positive");
    const auto wa = arctan_weights(a, c, delta), wb = arctan_weights(b, c, delta);
    return pwg_from_inners(pwg_inner_weighted(a, wa, a, wa, gaussian_bandwidth),
                           pwg_inner_weighted(b, wb, b, wb, gaussian_bandwidth),
                           pwg_inner_weighted(a, wa, b, wb, gaussian_bandwidth), tau);
}

double sw_from_distance(double sw_distance, double sigma) {
    return std::exp(-sw_distance / (2.0 * sigma * sigma));
}

double sw_kernel(const PersistenceDiagram& a, const PersistenceDiagram& b, double sigma, int n_slices) {
    if (!(sigma > 0.0)) throw InputError("SW sigma must be positive");
    return sw_from_distance(sliced_wasserstein_distance(a, b, n_slices), sigma);
}

std::string to_string(KernelKind k) {
    switch (k) {
        case KernelKind::pss: return "pss";
        case KernelKind::pwg: return "pwg";
        case KernelKind::sw: return "sw";
    }
    return "?";
}

KernelKind parse_kernel_kind(const std::string& s) {
    if (s == "pss") return KernelKind::pss;
    if (s == "pwg") return KernelKind::pwg;
    if (s == "sw") return KernelKind::sw;
    throw InputError("unknown kernel '" + s + "' (expected pss|pwg|sw)");
}

DiagramKernel::DiagramKernel(Params params, ScalingFunction scaling)
    : params_(std::move(params)), scaling_(scaling) {
    if (scaling_.variant == ScalingVariant::compress && scaling_.rho < 1)
        throw InputError("compress scaling needs rho >= 1");
    std::visit(
        [](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, PssParams>) {
                if (!(p.sigma > 0.0)) throw InputError("PSS sigma must be positive");
            } else if constexpr (std::is_same_v<P, PwgParams>) {
                check_pwg(p.gaussian_bandwidth, p.c, p.delta);
                if (!(p.tau > 0.0)) throw InputError("PWG tau must be positive");
            } else {
                if (!(p.sigma > 0.0)) throw InputError("SW sigma must be positive");
                if (p.n_slices < 1) throw InputError("SW n_slices must be >= 1");
            }
        },
        params_);
}

double DiagramKernel::base(const PersistenceDiagram& a, const PersistenceDiagram& b) const {
    return std::visit(
        [&](const auto& p) -> double {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, PssParams>)
                return pss_kernel(a, b, p.sigma);
            else if constexpr (std::is_same_v<P, PwgParams>)
                return pwg_kernel(a, b, p.gaussian_bandwidth, p.c, p.delta, p.tau);
            else
                return sw_kernel(a, b, p.sigma, p.n_slices);
        },
        params_);
}

double DiagramKernel::operator()(const PersistenceDiagram& a, const PersistenceDiagram& b) const {
    if (scaling_.variant == ScalingVariant::none) return base(a, b);
    return base(apply_scaling(a, scaling_), apply_scaling(b, scaling_));
}

std::string DiagramKernel::describe() const {
    std::ostringstream os;
    os.precision(6);
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, PssParams>)
                os << "PSS(sigma=" << p.sigma << ")";
            else if constexpr (std::is_same_v<P, PwgParams>)
                os << "PWG(rho_g=" << p.gaussian_bandwidth << ",C=" << p.c << ",delta=" << p.delta
                   << ",tau=" << p.tau << ")";
            else
                os << "SW(sigma=" << p.sigma << ",slices=" << p.n_slices << ")";
        },
        params_);
    if (scaling_.variant == ScalingVariant::compress)
        os << "+compress(rho=" << scaling_.rho << "," << to_string(scaling_.centre) << ")";
    else if (scaling_.variant == ScalingVariant::augment)
        os << "+augment(" << to_string(scaling_.centre) << ")";
    return os.str();
}

DiagramKernel make_vspk(const DiagramKernel& base, const ScalingFunction& s) {
    if (base.scaling().variant != ScalingVariant::none)
        throw InputError("make_vspk: base kernel is already scaled (" + base.describe() + ")");
    return base.with_scaling(s);
}

double induced_distance(const DiagramKernel& k, const PersistenceDiagram& a, const PersistenceDiagram& b) {
    return std::max(0.0, k(a, a) + k(b, b) - 2.0 * k(a, b));
}

namespace {

template <class Cell>
GramMatrix fill_symmetric(std::size_t n, unsigned jobs, Cell&& cell) {
    GramMatrix g(n, n);
    detail::parallel_for(n, jobs, [&](std::size_t i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = cell(i, j);
            if (!std::isfinite(v))
                throw ComputeError("non-finite kernel value for diagram pair (" + std::to_string(i) + ", " +
                                   std::to_string(j) + ")");
            g(i, j) = v;
            g(j, i) = v;
        }
    });
    return g;
}

}  // namespace

GramMatrix gram_matrix(const DiagramKernel& k, std::span<const PersistenceDiagram> diagrams, unsigned jobs) {
    if (diagrams.empty()) throw InputError("gram_matrix: empty diagram list");
    const std::size_t n = diagrams.size();
    std::vector<PersistenceDiagram> scaled(n);
    detail::parallel_for(n, jobs, [&](std::size_t i) { scaled[i] = apply_scaling(diagrams[i], k.scaling()); });

    if (const auto* p = std::get_if<PwgParams>(&k.params())) {
        std::vector<std::vector<double>> weights(n);
        std::vector<double> self(n);
        detail::parallel_for(n, jobs, [&](std::size_t i) {
            weights[i] = arctan_weights(scaled[i], p->c, p->delta);
            self[i] = pwg_inner_weighted(scaled[i], weights[i], scaled[i], weights[i], p->gaussian_bandwidth);
        });
        return fill_symmetric(n, jobs, [&](std::size_t i, std::size_t j) {
            const double cross = pwg_inner_weighted(scaled[i], weights[i], scaled[j], weights[j], p->gaussian_bandwidth);
            return pwg_from_inners(self[i], self[j], cross, p->tau);
        });
    }
    const DiagramKernel base = k.without_scaling();
    return fill_symmetric(n, jobs, [&](std::size_t i, std::size_t j) { return base.base(scaled[i], scaled[j]); });
}

double median_heuristic(std::span<const double> values) {
    std::vector<double> pos;
    for (double v : values) {
        if (v < 0.0 || !std::isfinite(v)) throw InputError("median_heuristic: values must be finite and nonnegative");
        if (v > 0.0) pos.push_back(v);
    }
    if (pos.empty()) throw InputError("median_heuristic: no positive value");
    const std::size_t mid = pos.size() / 2;
    std::nth_element(pos.begin(), pos.begin() + mid, pos.end());
    const double upper = pos[mid];
    if (pos.size() % 2 == 1) return upper;
    const double lower = *std::max_element(pos.begin(), pos.begin() + mid);
    return 0.5 * (lower + upper);
}

double pooled_point_median(std::span<const PersistenceDiagram> diagrams) {
    std::vector<BirthDeath> pts;
    for (const auto& d : diagrams) pts.insert(pts.end(), d.pairs().begin(), d.pairs().end());
    std::vector<double> dist;
    dist.reserve(pts.size() * (pts.size() - (pts.empty() ? 0 : 1)) / 2);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            dist.push_back(std::hypot(pts[i].birth - pts[j].birth, pts[i].death - pts[j].death));
    return median_heuristic(dist);
}

GramMatrix sliced_wasserstein_matrix(std::span<const PersistenceDiagram> diagrams, int n_slices, unsigned jobs) {
    const std::size_t n = diagrams.size();
    GramMatrix g(n, n);
    detail::parallel_for(n, jobs, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) g(i, j) = g(j, i) = sliced_wasserstein_distance(diagrams[i], diagrams[j], n_slices);
    });
    return g;
}

}  // namespace vspk
