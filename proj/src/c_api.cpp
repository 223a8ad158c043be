#include "vspk/vspk.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "vspk/error.hpp"
#include "vspk/geometry.hpp"
#include "vspk/io.hpp"
#include "vspk/kernels.hpp"
#include "vspk/persistence.hpp"
#include "vspk/pipeline.hpp"
#include "vspk/scaling.hpp"
#include "vspk/svm.hpp"

struct vspk_cloud {
    vspk::PointCloud value;
};
struct vspk_diagram {
    vspk::PersistenceDiagram value;
};
struct vspk_kernel {
    vspk::DiagramKernel value;
};
struct vspk_svm {
    vspk::OneVsRestSvm value;
    std::size_t n_train = 0;
};

namespace {

thread_local std::string last_error;

vspk_status fail(vspk_status s, const char* what) {
    last_error = what;
    return s;
}

template <class F>
vspk_status guarded(F&& f) {
    try {
        f();
        return VSPK_OK;
    } catch (const vspk::InputError& e) {
        return fail(VSPK_INPUT_ERROR, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(VSPK_INPUT_ERROR, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(VSPK_INPUT_ERROR, e.what());
    } catch (const vspk::ComputeError& e) {
        return fail(VSPK_COMPUTE_ERROR, e.what());
    } catch (const std::bad_alloc&) {
        return fail(VSPK_COMPUTE_ERROR, "out of memory");
    } catch (const std::exception& e) {
        return fail(VSPK_INTERNAL_ERROR, e.what());
    } catch (...) {
        return fail(VSPK_INTERNAL_ERROR, "unknown error");
    }
}

void require(const void* p, const char* name) {
    if (!p) throw vspk::InputError(std::string(name) + " is null");
}

vspk::ScalingFunction to_scaling(vspk_scaling s, int rho, vspk_centre c) {
    const auto centre = c == VSPK_CENTRE_MASS ? vspk::CentreKind::uniform_mass : vspk::CentreKind::persistence_weighted;
    switch (s) {
        case VSPK_SCALING_NONE: return vspk::ScalingFunction::none();
        case VSPK_SCALING_AUGMENT: return vspk::ScalingFunction::augment(centre);
        case VSPK_SCALING_COMPRESS: return vspk::ScalingFunction::compress(rho, centre);
    }
    throw vspk::InputError("unknown scaling variant");
}

template <class T, class V>
void emit(T** out, V&& value) {
    *out = new T{std::forward<V>(value)};
}

}  // namespace

extern "C" {

const char* vspk_last_error(void) { return last_error.c_str(); }

const char* vspk_version(void) { return "1.0.0"; }

vspk_status vspk_cloud_create(const double* coords, size_t n, size_t dim, vspk_cloud** out) {
    return guarded([&] {
        require(out, "out");
        if (n > 0) require(coords, "coords");
        emit(out, vspk::PointCloud(std::vector<double>(coords, coords + n * dim), dim));
    });
}

vspk_status vspk_cloud_orbit(double x0, double y0, double r, size_t n_points, vspk_cloud** out) {
    return guarded([&] {
        require(out, "out");
        emit(out, vspk::linked_twisted_orbit({x0, y0, r, n_points}));
    });
}

vspk_status vspk_cloud_read_csv(const char* path, vspk_cloud** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        emit(out, vspk::read_cloud_csv(path));
    });
}

size_t vspk_cloud_size(const vspk_cloud* c) { return c ? c->value.size() : 0; }
size_t vspk_cloud_dim(const vspk_cloud* c) { return c ? c->value.dim() : 0; }

vspk_status vspk_cloud_coordinates(const vspk_cloud* c, double* coords) {
    return guarded([&] {
        require(c, "cloud");
        const auto v = c->value.coordinates();
        if (!v.empty()) require(coords, "coords");
        std::copy(v.begin(), v.end(), coords);
    });
}

void vspk_cloud_free(vspk_cloud* c) { delete c; }

vspk_status vspk_hausdorff(const vspk_cloud* a, const vspk_cloud* b, double* out) {
    return guarded([&] {
        require(a, "a");
        require(b, "b");
        require(out, "out");
        *out = vspk::hausdorff_distance(a->value, b->value);
    });
}

vspk_status vspk_cloud_diagram(const vspk_cloud* c, int r, double threshold, vspk_diagram** out) {
    return guarded([&] {
        require(c, "cloud");
        require(out, "out");
        if (r < 0) throw vspk::InputError("homology dimension must be nonnegative");
        const auto dm = vspk::pairwise_distances(c->value);
        const double t = threshold < 0.0 ? vspk::enclosing_radius(dm) : threshold;
        emit(out, vspk::diagram_from_pairs(vspk::rips_persistence(dm, r, t), r));
    });
}

vspk_status vspk_diagram_create(int dim, const double* pairs, size_t n, vspk_diagram** out) {
    return guarded([&] {
        require(out, "out");
        if (n > 0) require(pairs, "pairs");
        std::vector<vspk::BirthDeath> points(n);
        for (size_t i = 0; i < n; ++i) points[i] = {pairs[2 * i], pairs[2 * i + 1]};
        emit(out, vspk::PersistenceDiagram(dim, std::move(points)));
    });
}

vspk_status vspk_diagram_read_csv(const char* path, int dim, vspk_diagram** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        emit(out, vspk::diagram_from_pairs(vspk::read_pairs_csv(path), dim));
    });
}

vspk_status vspk_diagram_write_csv(const vspk_diagram* d, const char* path) {
    return guarded([&] {
        require(d, "diagram");
        require(path, "path");
        std::vector<vspk::PersistencePair> pairs;
        for (const auto& p : d->value.pairs()) pairs.push_back({d->value.dimension(), p.birth, p.death});
        vspk::write_pairs_csv(path, pairs);
    });
}

size_t vspk_diagram_size(const vspk_diagram* d) { return d ? d->value.size() : 0; }
int vspk_diagram_dim(const vspk_diagram* d) { return d ? d->value.dimension() : -1; }

vspk_status vspk_diagram_pairs(const vspk_diagram* d, double* pairs) {
    return guarded([&] {
        require(d, "diagram");
        if (!d->value.empty()) require(pairs, "pairs");
        std::size_t i = 0;
        for (const auto& p : d->value.pairs()) {
            pairs[i++] = p.birth;
            pairs[i++] = p.death;
        }
    });
}

void vspk_diagram_free(vspk_diagram* d) { delete d; }

vspk_status vspk_bottleneck(const vspk_diagram* a, const vspk_diagram* b, double* out) {
    return guarded([&] {
        require(a, "a");
        require(b, "b");
        require(out, "out");
        *out = vspk::bottleneck_distance(a->value, b->value);
    });
}

vspk_status vspk_wasserstein(const vspk_diagram* a, const vspk_diagram* b, double p, double* out) {
    return guarded([&] {
        require(a, "a");
        require(b, "b");
        require(out, "out");
        *out = vspk::wasserstein_distance(a->value, b->value, p);
    });
}

vspk_status vspk_sliced_wasserstein(const vspk_diagram* a, const vspk_diagram* b, int n_slices, double* out) {
    return guarded([&] {
        require(a, "a");
        require(b, "b");
        require(out, "out");
        *out = vspk::sliced_wasserstein_distance(a->value, b->value, n_slices);
    });
}

vspk_status vspk_diagram_scale(const vspk_diagram* d, vspk_scaling s, int rho, vspk_centre centre,
                               vspk_diagram** out) {
    return guarded([&] {
        require(d, "diagram");
        require(out, "out");
        emit(out, vspk::apply_scaling(d->value, to_scaling(s, rho, centre)));
    });
}

vspk_status vspk_kernel_pss(double sigma, vspk_kernel** out) {
    return guarded([&] {
        require(out, "out");
        emit(out, vspk::DiagramKernel::pss(sigma));
    });
}

vspk_status vspk_kernel_pwg(double gaussian_bandwidth, double c, int delta, double tau, vspk_kernel** out) {
    return guarded([&] {
        require(out, "out");
        emit(out, vspk::DiagramKernel::pwg(gaussian_bandwidth, c, delta, tau));
    });
}

vspk_status vspk_kernel_sw(double sigma, int n_slices, vspk_kernel** out) {
    return guarded([&] {
        require(out, "out");
        emit(out, vspk::DiagramKernel::sw(sigma, n_slices));
    });
}

vspk_status vspk_kernel_with_scaling(const vspk_kernel* base, vspk_scaling s, int rho, vspk_centre centre,
                                     vspk_kernel** out) {
    return guarded([&] {
        require(base, "base");
        require(out, "out");
        emit(out, base->value.with_scaling(to_scaling(s, rho, centre)));
    });
}

vspk_status vspk_kernel_eval(const vspk_kernel* k, const vspk_diagram* a, const vspk_diagram* b, double* out) {
    return guarded([&] {
        require(k, "kernel");
        require(a, "a");
        require(b, "b");
        require(out, "out");
        *out = k->value(a->value, b->value);
    });
}

vspk_status vspk_kernel_gram(const vspk_kernel* k, const vspk_diagram* const* diagrams, size_t n, unsigned jobs,
                             double* out) {
    return guarded([&] {
        require(k, "kernel");
        if (n > 0) {
            require(diagrams, "diagrams");
            require(out, "out");
        }
        std::vector<vspk::PersistenceDiagram> ds;
        ds.reserve(n);
        for (size_t i = 0; i < n; ++i) {
            require(diagrams[i], "diagram");
            ds.push_back(diagrams[i]->value);
        }
        const auto g = vspk::gram_matrix(k->value, ds, jobs);
        std::copy(g.values().begin(), g.values().end(), out);
    });
}

void vspk_kernel_free(vspk_kernel* k) { delete k; }

vspk_status vspk_svm_train(const double* gram, size_t n, const int* labels, double box, vspk_svm** out) {
    return guarded([&] {
        require(gram, "gram");
        require(labels, "labels");
        require(out, "out");
        vspk::GramMatrix k(n, n, std::vector<double>(gram, gram + n * n));
        *out = new vspk_svm{vspk::train_ovr(k, std::span<const int>(labels, n), box), n};
    });
}

vspk_status vspk_svm_predict(const vspk_svm* model, const double* k_rows, size_t m, int* out) {
    return guarded([&] {
        require(model, "model");
        if (m == 0) return;
        require(k_rows, "k_rows");
        require(out, "out");
        const vspk::GramMatrix rows(m, model->n_train, std::vector<double>(k_rows, k_rows + m * model->n_train));
        const auto pred = vspk::predict_ovr(model->value, rows);
        std::copy(pred.begin(), pred.end(), out);
    });
}

void vspk_svm_free(vspk_svm* model) { delete model; }

vspk_status vspk_scores(const int* y_true, const int* y_pred, size_t n, double* accuracy, double* f1) {
    return guarded([&] {
        if (n > 0) {
            require(y_true, "y_true");
            require(y_pred, "y_pred");
        }
        require(accuracy, "accuracy");
        require(f1, "f1");
        const auto s = vspk::scores(std::span<const int>(y_true, n), std::span<const int>(y_pred, n));
        *accuracy = s.accuracy;
        *f1 = s.f1;
    });
}

vspk_status vspk_run_command(const char* command, const char* config_json, char** result_json) {
    return guarded([&] {
        require(command, "command");
        require(result_json, "result_json");
        const auto config = config_json && *config_json ? nlohmann::json::parse(config_json) : nlohmann::json::object();
        const auto text = vspk::run_command(command, config).dump(2);
        char* buf = static_cast<char*>(std::malloc(text.size() + 1));
        if (!buf) throw std::bad_alloc();
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *result_json = buf;
    });
}

void vspk_string_free(char* s) { std::free(s); }

}  // extern "C"
