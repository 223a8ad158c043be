#include "vspk/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "parallel.hpp"
#include "vspk/error.hpp"
#include "vspk/geometry.hpp"
#include "vspk/io.hpp"
#include "vspk/random.hpp"
#include "vspk/svm.hpp"

namespace vspk {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Typed access to a flat JSON config object. Unknown keys are rejected so a
// misspelt option never silently falls back to its default; null means absent.
class ConfigReader {
public:
    ConfigReader(const json& j, std::string command, std::initializer_list<const char*> keys)
        : j_(j), command_(std::move(command)) {
        if (!j_.is_object()) throw InputError(command_ + ": config must be a JSON object");
        for (const auto& [k, v] : j_.items()) {
            if (std::none_of(keys.begin(), keys.end(), [&](const char* key) { return k == key; }))
                throw InputError(command_ + ": unknown config key '" + k + "'");
        }
    }

    bool has(const std::string& k) const { return j_.contains(k) && !j_.at(k).is_null(); }

    template <class T>
    T as(const std::string& k) const {
        try {
            return j_.at(k).get<T>();
        } catch (const json::exception& e) {
            throw InputError(command_ + ": config key '" + k + "': " + e.what());
        }
    }

    template <class T>
    void read(const std::string& k, T& dst) const {
        if (has(k)) dst = as<T>(k);
    }
    template <class T>
    void read(const std::string& k, std::optional<T>& dst) const {
        if (has(k)) dst = as<T>(k);
    }
    void read(const std::string& k, fs::path& dst) const {
        if (has(k)) dst = as<std::string>(k);
    }
    void read(const std::string& k, std::optional<fs::path>& dst) const {
        if (has(k)) dst = fs::path(as<std::string>(k));
    }

    /// Counts must be nonnegative integers; get<size_t> would wrap negatives.
    void read_count(const std::string& k, std::size_t& dst) const {
        if (!has(k)) return;
        const auto& v = j_.at(k);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw InputError(command_ + ": config key '" + k + "' must be a nonnegative integer");
        dst = v.get<std::size_t>();
    }
    void read_jobs(unsigned& dst) const {
        std::size_t v = dst;
        read_count("jobs", v);
        dst = static_cast<unsigned>(v);
    }
    void read_seed(std::uint64_t& dst) const {
        if (!has("seed")) return;
        const auto& v = j_.at("seed");
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
            throw InputError(command_ + ": config key 'seed' must be a nonnegative integer");
        dst = v.get<std::uint64_t>();
    }

    const json& raw(const std::string& k) const { return j_.at(k); }
    const std::string& command() const { return command_; }

private:
    const json& j_;
    std::string command_;
};

ScalingFunction read_scaling(const ConfigReader& r) {
    std::string variant = "none", aux = "persistence";
    int rho = 10;
    r.read("scaling", variant);
    r.read("aux", aux);
    r.read("rho", rho);
    const auto v = parse_scaling_variant(variant);
    const auto c = parse_centre_kind(aux);
    switch (v) {
        case ScalingVariant::none: return ScalingFunction::none();
        case ScalingVariant::augment: return ScalingFunction::augment(c);
        case ScalingVariant::compress: return ScalingFunction::compress(rho, c);
    }
    return ScalingFunction::none();
}

json scaling_json(const ScalingFunction& s) {
    json j = {{"scaling", to_string(s.variant)}};
    if (s.variant != ScalingVariant::none) j["aux"] = to_string(s.centre);
    if (s.variant == ScalingVariant::compress) j["rho"] = s.rho;
    return j;
}

void read_grid(const ConfigReader& r, GridConfig& g) {
    r.read("boxes", g.boxes);
    r.read("pss_sigmas", g.pss_sigmas);
    r.read("pwg_c", g.pwg_c);
    r.read("pwg_tau", g.pwg_tau);
    r.read("delta", g.pwg_delta);
    r.read("sw_multipliers", g.sw_multipliers);
    r.read("n_slices", g.n_slices);
    const auto positive = [&](const std::vector<double>& v, const char* name) {
        if (v.empty()) throw InputError(r.command() + ": grid '" + name + "' is empty");
        for (double x : v)
            if (!(x > 0.0) || !std::isfinite(x))
                throw InputError(r.command() + ": grid '" + name + "' needs positive finite values");
    };
    positive(g.boxes, "boxes");
    positive(g.pss_sigmas, "pss_sigmas");
    positive(g.pwg_c, "pwg_c");
    positive(g.pwg_tau, "pwg_tau");
    positive(g.sw_multipliers, "sw_multipliers");
    if (g.n_slices < 1) throw InputError(r.command() + ": n_slices must be >= 1");
    if (g.pwg_delta < 1) throw InputError(r.command() + ": delta must be >= 1");
}

json grid_json(const GridConfig& g, KernelKind kind) {
    json j = {{"boxes", g.boxes}};
    switch (kind) {
        case KernelKind::pss: j["pss_sigmas"] = g.pss_sigmas; break;
        case KernelKind::pwg:
            j["pwg_c"] = g.pwg_c;
            j["pwg_tau"] = g.pwg_tau;
            j["delta"] = g.pwg_delta;
            break;
        case KernelKind::sw:
            j["sw_multipliers"] = g.sw_multipliers;
            j["n_slices"] = g.n_slices;
            break;
    }
    return j;
}

fs::path resolve_input(const fs::path& p) {
    if (p.is_absolute() || fs::exists(p)) return p;
    const char* root = std::getenv(kOutputRootVar);
    if (root && *root && fs::exists(fs::path(root) / p)) return fs::path(root) / p;
    return p;
}

std::string padded(std::size_t v, std::size_t width) {
    auto s = std::to_string(v);
    return s.size() >= width ? s : std::string(width - s.size(), '0') + s;
}

std::size_t digits(std::size_t n) { return n <= 1 ? 1 : std::to_string(n - 1).size(); }

// Finite pairs of dimension `dim` reduced to the k most persistent (k = 0: all),
// followed by the essential pairs of that dimension.
std::vector<PersistencePair> reduce_pairs(const std::vector<PersistencePair>& pairs, int dim, std::size_t top_k) {
    auto d = diagram_from_pairs(pairs, dim);
    if (top_k > 0) d = top_k_persistent(d, top_k);
    std::vector<PersistencePair> out;
    for (const auto& p : d.pairs()) out.push_back({dim, p.birth, p.death});
    for (const auto& p : pairs)
        if (p.dimension == dim && p.essential()) out.push_back(p);
    return out;
}

// Base kernels of a grid (no scaling), the matching CV labels, and a Gram
// producer over the (already scaled) training diagrams.
struct KernelGrid {
    std::vector<DiagramKernel> kernels;
    std::vector<std::string> labels;
    GramProducer producer;
    json calibration = json::object();
};

KernelGrid make_grid(KernelKind kind, const GridConfig& g, std::shared_ptr<const std::vector<PersistenceDiagram>> train,
                     unsigned jobs) {
    KernelGrid grid;
    switch (kind) {
        case KernelKind::pss:
            for (double s : g.pss_sigmas) grid.kernels.push_back(DiagramKernel::pss(s));
            break;
        case KernelKind::pwg: {
            double rho_g = 1.0;
            try {
                rho_g = pooled_point_median(*train);
                grid.calibration["bandwidth"] = rho_g;
            } catch (const InputError&) {
                grid.calibration["bandwidth"] = rho_g;
                grid.calibration["bandwidth_fallback"] = true;
            }
            for (double c : g.pwg_c)
                for (double tau : g.pwg_tau) grid.kernels.push_back(DiagramKernel::pwg(rho_g, c, g.pwg_delta, tau));
            break;
        }
        case KernelKind::sw: {
            auto dist = std::make_shared<GramMatrix>(sliced_wasserstein_matrix(*train, g.n_slices, jobs));
            double median = 1.0;
            try {
                median = median_heuristic(dist->values());
                grid.calibration["sw_median"] = median;
            } catch (const InputError&) {
                grid.calibration["sw_median"] = median;
                grid.calibration["sw_median_fallback"] = true;
            }
            for (double m : g.sw_multipliers) grid.kernels.push_back(DiagramKernel::sw(m * median, g.n_slices));
            grid.producer = [kernels = grid.kernels, dist](std::size_t k) {
                const double sigma = std::get<SwParams>(kernels[k].params()).sigma;
                GramMatrix out(dist->rows(), dist->cols());
                for (std::size_t i = 0; i < dist->rows(); ++i)
                    for (std::size_t j = 0; j < dist->cols(); ++j) out(i, j) = sw_from_distance((*dist)(i, j), sigma);
                return out;
            };
            break;
        }
    }
    for (const auto& k : grid.kernels) grid.labels.push_back(k.describe());
    if (!grid.producer)
        grid.producer = [kernels = grid.kernels, train, jobs](std::size_t k) {
            return gram_matrix(kernels[k], *train, jobs);
        };
    return grid;
}

// (rows x cols) block of base-kernel values.
GramMatrix kernel_block(const DiagramKernel& k, const std::vector<PersistenceDiagram>& rows,
                        const std::vector<PersistenceDiagram>& cols, unsigned jobs) {
    GramMatrix out(rows.size(), cols.size());
    detail::parallel_for(rows.size(), jobs, [&](std::size_t i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const double v = k.base(rows[i], cols[j]);
            if (!std::isfinite(v))
                throw ComputeError("non-finite kernel value for test sample " + std::to_string(i) +
                                   " against training sample " + std::to_string(j));
            out(i, j) = v;
        }
    });
    return out;
}

json cv_json(const CvReport& cv, const KernelGrid& grid) {
    json entries = json::array();
    for (const auto& e : cv.entries)
        entries.push_back({{"kernel", e.kernel_label},
                           {"box", e.box},
                           {"fold_accuracy", e.fold_accuracy},
                           {"fold_f1", e.fold_f1},
                           {"mean_accuracy", e.mean_accuracy},
                           {"mean_f1", e.mean_f1}});
    const auto& best = cv.best();
    return {{"entries", entries},
            {"selected",
             {{"index", cv.selected},
              {"kernel", best.kernel_label},
              {"box", best.box},
              {"mean_accuracy", best.mean_accuracy},
              {"mean_f1", best.mean_f1}}},
            {"calibration", grid.calibration},
            {"folds", cv.folds}};
}

// Diagram fed to the scaling map: compress sees the full diagram so the
// discarded generators end up in its centre; the other variants see the
// top-k reduction.
PersistenceDiagram prepare(const PersistenceDiagram& full, const ScalingFunction& s, std::size_t top_k) {
    if (top_k == 0 || s.variant == ScalingVariant::compress) return full;
    return top_k_persistent(full, top_k);
}

std::vector<PersistenceDiagram> scaled_subset(const std::vector<PersistenceDiagram>& diagrams,
                                              std::span<const std::size_t> idx, const ScalingFunction& s,
                                              std::size_t top_k) {
    std::vector<PersistenceDiagram> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(apply_scaling(prepare(diagrams[i], s, top_k), s));
    return out;
}

std::string row_name(KernelKind k, const ScalingFunction& s) {
    std::string name = to_string(k) + "_" + to_string(s.variant);
    if (s.variant == ScalingVariant::compress) name += std::to_string(s.rho);
    if (s.variant != ScalingVariant::none) name += "_" + to_string(s.centre);
    return name;
}

std::string psi_label(const ScalingFunction& s) {
    switch (s.variant) {
        case ScalingVariant::none: return "-";
        case ScalingVariant::augment: return "augment";
        case ScalingVariant::compress: return "compress(" + std::to_string(s.rho) + ")";
    }
    return "?";
}

std::string aux_label(const ScalingFunction& s) {
    if (s.variant == ScalingVariant::none) return "-";
    return s.centre == CentreKind::uniform_mass ? "mass" : "persistence";
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

}  // namespace

fs::path resolve_output(const fs::path& p) {
    if (p.is_absolute()) return p;
    const char* root = std::getenv(kOutputRootVar);
    if (root && *root) return fs::path(root) / p;
    return p;
}

std::vector<int> encode_labels(const std::vector<std::string>& labels, std::vector<std::string>* classes) {
    std::vector<std::string> distinct(labels.begin(), labels.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    bool numeric = !distinct.empty();
    std::map<std::string, double> value;
    for (const auto& l : distinct) {
        try {
            value[l] = parse_double(l);
            if (!std::isfinite(value[l])) numeric = false;
        } catch (const InputError&) {
            numeric = false;
        }
    }
    if (numeric)
        std::stable_sort(distinct.begin(), distinct.end(),
                         [&](const std::string& a, const std::string& b) { return value[a] < value[b]; });
    std::map<std::string, int> id;
    for (std::size_t i = 0; i < distinct.size(); ++i) id[distinct[i]] = static_cast<int>(i);
    std::vector<int> out;
    out.reserve(labels.size());
    for (const auto& l : labels) out.push_back(id.at(l));
    if (classes) *classes = distinct;
    return out;
}

GridConfig GridConfig::defaults() {
    GridConfig g;
    for (int j = -3; j <= 3; ++j) g.boxes.push_back(std::pow(10.0, j));
    for (int j = -3; j <= 3; ++j) {
        g.pss_sigmas.push_back(std::pow(10.0, j));
        if (j <= 2) g.pss_sigmas.push_back(5.0 * std::pow(10.0, j));
    }
    for (int j = -2; j <= 2; ++j) {
        g.pwg_c.push_back(std::pow(10.0, j));
        g.pwg_tau.push_back(std::pow(10.0, j));
    }
    g.sw_multipliers = {0.01, 0.1, 1.0, 10.0, 100.0};
    return g;
}

GenerateOrbitsConfig GenerateOrbitsConfig::from_json(const json& j) {
    ConfigReader r(j, "generate-orbits",
                   {"out", "labels", "orbits_per_label", "points", "seed", "top_k", "threshold", "simplex_cap", "jobs"});
    GenerateOrbitsConfig c;
    r.read("out", c.out);
    r.read("labels", c.labels);
    r.read_count("orbits_per_label", c.orbits_per_label);
    r.read_count("points", c.points);
    r.read_seed(c.seed);
    r.read_count("top_k", c.top_k);
    r.read("threshold", c.threshold);
    r.read_count("simplex_cap", c.simplex_cap);
    r.read_jobs(c.jobs);
    return c;
}

ComputeDiagramsConfig ComputeDiagramsConfig::from_json(const json& j) {
    ConfigReader r(j, "compute-diagrams",
                   {"input", "out", "labels_file", "max_dim", "threshold", "dims", "simplex_cap", "jobs"});
    ComputeDiagramsConfig c;
    if (!r.has("input")) throw InputError("compute-diagrams: 'input' directory is required");
    r.read("input", c.input);
    r.read("out", c.out);
    r.read("labels_file", c.labels_file);
    r.read("max_dim", c.max_dim);
    r.read("threshold", c.threshold);
    r.read("dims", c.dims);
    r.read_count("simplex_cap", c.simplex_cap);
    r.read_jobs(c.jobs);
    return c;
}

GramConfig GramConfig::from_json(const json& j) {
    ConfigReader r(j, "gram",
                   {"diagrams", "out", "dim", "kernel", "sigma", "bandwidth", "c", "delta", "tau", "n_slices",
                    "scaling", "rho", "aux", "essential_cap", "jobs"});
    GramConfig c;
    if (!r.has("diagrams")) throw InputError("gram: 'diagrams' directory is required");
    r.read("diagrams", c.diagrams);
    r.read("out", c.out);
    r.read("dim", c.dim);
    if (r.has("kernel")) c.kind = parse_kernel_kind(r.as<std::string>("kernel"));
    r.read("sigma", c.sigma);
    r.read("bandwidth", c.bandwidth);
    r.read("c", c.c);
    r.read("delta", c.delta);
    r.read("tau", c.tau);
    r.read("n_slices", c.n_slices);
    c.scaling = read_scaling(r);
    r.read("essential_cap", c.essential_cap);
    r.read_jobs(c.jobs);
    return c;
}

CrossValidateConfig CrossValidateConfig::from_json(const json& j) {
    ConfigReader r(j, "cross-validate",
                   {"diagrams", "out", "dim", "top_k", "kernel", "scaling", "rho", "aux", "boxes", "pss_sigmas",
                    "pwg_c", "pwg_tau", "delta", "sw_multipliers", "n_slices", "folds", "seed", "jobs"});
    CrossValidateConfig c;
    if (!r.has("diagrams")) throw InputError("cross-validate: 'diagrams' directory is required");
    r.read("diagrams", c.diagrams);
    r.read("out", c.out);
    r.read("dim", c.dim);
    r.read_count("top_k", c.top_k);
    if (r.has("kernel")) c.kind = parse_kernel_kind(r.as<std::string>("kernel"));
    c.scaling = read_scaling(r);
    read_grid(r, c.grid);
    r.read_count("folds", c.folds);
    r.read_seed(c.seed);
    r.read_jobs(c.jobs);
    return c;
}

std::vector<ScalingFunction> ExperimentConfig::default_scalings() {
    return {ScalingFunction::augment(CentreKind::uniform_mass), ScalingFunction::augment(CentreKind::persistence_weighted),
            ScalingFunction::compress(10, CentreKind::uniform_mass),
            ScalingFunction::compress(10, CentreKind::persistence_weighted)};
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ConfigReader r(j, "run-experiment",
                   {"diagrams", "orbits", "out", "dim", "top_k", "kernels", "scalings", "boxes", "pss_sigmas", "pwg_c",
                    "pwg_tau", "delta", "sw_multipliers", "n_slices", "repetitions", "split", "folds", "seed", "jobs"});
    ExperimentConfig c;
    c.scalings = default_scalings();
    r.read_seed(c.seed);
    r.read("diagrams", c.diagrams);
    if (r.has("orbits")) {
        c.orbits = GenerateOrbitsConfig::from_json(r.raw("orbits"));
        if (!r.raw("orbits").contains("seed")) c.orbits->seed = c.seed;
    }
    if (c.diagrams && c.orbits) throw InputError("run-experiment: give either 'diagrams' or 'orbits', not both");
    r.read("out", c.out);
    r.read("dim", c.dim);
    r.read_count("top_k", c.top_k);
    if (r.has("kernels")) {
        c.kernels.clear();
        for (const auto& k : r.as<std::vector<std::string>>("kernels")) c.kernels.push_back(parse_kernel_kind(k));
    }
    if (r.has("scalings")) {
        c.scalings.clear();
        const auto& list = r.raw("scalings");
        if (!list.is_array()) throw InputError("run-experiment: 'scalings' must be an array");
        for (const auto& s : list) {
            ConfigReader sr(s, "run-experiment scalings", {"scaling", "rho", "aux"});
            const auto f = read_scaling(sr);
            if (f.variant != ScalingVariant::none) c.scalings.push_back(f);
        }
    }
    read_grid(r, c.grid);
    r.read_count("repetitions", c.repetitions);
    r.read("split", c.split);
    r.read_count("folds", c.folds);
    r.read_jobs(c.jobs);
    return c;
}

OracleCheckConfig OracleCheckConfig::from_json(const json& j) {
    ConfigReader r(j, "oracle-check", {"clouds", "min_points", "max_points", "dims", "offset", "seed", "out"});
    OracleCheckConfig c;
    r.read_count("clouds", c.clouds);
    r.read_count("min_points", c.min_points);
    r.read_count("max_points", c.max_points);
    r.read("dims", c.dims);
    r.read("offset", c.offset);
    r.read_seed(c.seed);
    r.read("out", c.out);
    return c;
}

json generate_orbits(const GenerateOrbitsConfig& cfg) {
    if (cfg.labels.empty()) throw InputError("generate-orbits: no labels");
    if (cfg.orbits_per_label == 0) throw InputError("generate-orbits: orbits_per_label must be >= 1");
    if (cfg.points == 0) throw InputError("generate-orbits: points must be >= 1");
    if (cfg.threshold && !(*cfg.threshold >= 0.0)) throw InputError("generate-orbits: threshold must be >= 0");
    for (double r : cfg.labels)
        if (!std::isfinite(r)) throw InputError("generate-orbits: labels must be finite");

    struct Sample {
        std::string id, label;
        OrbitParams params;
        std::vector<PersistencePair> pairs;
        std::string error;
    };
    std::vector<Sample> samples;
    Rng rng(cfg.seed);
    const auto width = digits(cfg.orbits_per_label);
    for (double r : cfg.labels) {
        for (std::size_t k = 0; k < cfg.orbits_per_label; ++k) {
            Sample s;
            s.label = format_double(r);
            s.id = "r" + s.label + "_" + padded(k, width);
            s.params.x0 = rng.uniform();
            s.params.y0 = rng.uniform();
            s.params.r = r;
            s.params.n_points = cfg.points;
            samples.push_back(std::move(s));
        }
    }

    detail::parallel_for(samples.size(), cfg.jobs, [&](std::size_t i) {
        auto& s = samples[i];
        try {
            const auto dm = pairwise_distances(linked_twisted_orbit(s.params));
            const double threshold = cfg.threshold ? *cfg.threshold : enclosing_radius(dm);
            s.pairs = reduce_pairs(rips_persistence(dm, 1, threshold, cfg.simplex_cap), 1, cfg.top_k);
        } catch (const ComputeError& e) {
            s.error = e.what();
        }
    });

    const auto out = resolve_output(cfg.out);
    fs::create_directories(out);
    Manifest m;
    json flagged = json::array();
    for (const auto& s : samples) {
        ManifestEntry e;
        e.id = s.id;
        e.label = s.label;
        if (s.error.empty()) {
            e.files[1] = s.id + ".h1.csv";
            write_pairs_csv(out / e.files[1], s.pairs);
        } else {
            e.flagged = true;
            e.error = s.error;
            flagged.push_back({{"id", s.id}, {"error", s.error}});
        }
        m.samples.push_back(std::move(e));
    }
    write_manifest(out, m);

    json starts = json::array();
    for (const auto& s : samples) starts.push_back({{"id", s.id}, {"x0", s.params.x0}, {"y0", s.params.y0}});
    json meta = {{"labels", cfg.labels},
                 {"orbits_per_label", cfg.orbits_per_label},
                 {"points", cfg.points},
                 {"seed", cfg.seed},
                 {"top_k", cfg.top_k},
                 {"threshold", cfg.threshold ? json(*cfg.threshold) : json("enclosing_radius")},
                 {"starts", starts}};
    write_text(out / "orbits.json", meta.dump(2) + "\n");
    return {{"out", out.string()}, {"samples", samples.size()}, {"flagged", flagged}};
}

json compute_diagrams(const ComputeDiagramsConfig& cfg) {
    if (cfg.max_dim < 0) throw InputError("compute-diagrams: max_dim must be >= 0");
    if (cfg.threshold && !(*cfg.threshold >= 0.0)) throw InputError("compute-diagrams: threshold must be >= 0");
    std::vector<int> dims = cfg.dims;
    if (dims.empty())
        for (int d = 0; d <= cfg.max_dim; ++d) dims.push_back(d);
    for (int d : dims)
        if (d < 0 || d > cfg.max_dim)
            throw InputError("compute-diagrams: dimension " + std::to_string(d) + " outside 0..max_dim");

    const auto input = resolve_input(cfg.input);
    if (!fs::is_directory(input)) throw InputError("compute-diagrams: not a directory: " + input.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(input))
        if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::map<std::string, std::string> labels;
    if (cfg.labels_file) {
        std::istringstream in(read_text(resolve_input(*cfg.labels_file)));
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos)
                throw InputError("labels file: expected 'file,label', got '" + line + "'");
            const auto file = line.substr(0, comma), label = line.substr(comma + 1);
            if (first && file == "file") {
                first = false;
                continue;
            }
            first = false;
            labels[file] = label;
        }
    }

    struct Sample {
        std::vector<PersistencePair> pairs;
        std::string error;
    };
    std::vector<Sample> samples(files.size());
    detail::parallel_for(files.size(), cfg.jobs, [&](std::size_t i) {
        try {
            const auto cloud = read_cloud_csv(files[i]);
            const auto dm = pairwise_distances(cloud);
            const double threshold = cfg.threshold ? *cfg.threshold : enclosing_radius(dm);
            samples[i].pairs = rips_persistence(dm, cfg.max_dim, threshold, cfg.simplex_cap);
        } catch (const InputError& e) {
            samples[i].error = e.what();
        } catch (const ComputeError& e) {
            samples[i].error = e.what();
        }
    });

    const auto out = resolve_output(cfg.out);
    fs::create_directories(out);
    Manifest m;
    json warnings = json::array();
    if (files.empty()) warnings.push_back("no .csv point clouds in " + input.string());
    for (std::size_t i = 0; i < files.size(); ++i) {
        ManifestEntry e;
        e.id = files[i].stem().string();
        if (auto it = labels.find(files[i].filename().string()); it != labels.end())
            e.label = it->second;
        else if (auto it2 = labels.find(e.id); it2 != labels.end())
            e.label = it2->second;
        if (!samples[i].error.empty()) {
            e.flagged = true;
            e.error = samples[i].error;
            warnings.push_back(files[i].filename().string() + ": " + samples[i].error);
        } else {
            for (int d : dims) {
                std::vector<PersistencePair> pairs;
                for (const auto& p : samples[i].pairs)
                    if (p.dimension == d) pairs.push_back(p);
                e.files[d] = e.id + ".h" + std::to_string(d) + ".csv";
                write_pairs_csv(out / e.files[d], pairs);
            }
        }
        m.samples.push_back(std::move(e));
    }
    write_manifest(out, m);
    return {{"out", out.string()}, {"samples", files.size()}, {"warnings", warnings}};
}

json gram(const GramConfig& cfg) {
    const auto policy = cfg.essential_cap ? EssentialPolicy::cap(*cfg.essential_cap) : EssentialPolicy::drop();
    const auto set = load_diagram_set(resolve_input(cfg.diagrams), cfg.dim, policy);

    std::vector<PersistenceDiagram> scaled;
    for (const auto& d : set.diagrams) scaled.push_back(apply_scaling(d, cfg.scaling));

    json params;
    DiagramKernel::Params p;
    switch (cfg.kind) {
        case KernelKind::pss:
            if (!cfg.sigma) throw InputError("gram: PSS needs 'sigma'");
            p = PssParams{*cfg.sigma};
            params = {{"sigma", *cfg.sigma}};
            break;
        case KernelKind::pwg: {
            const double bw = cfg.bandwidth ? *cfg.bandwidth : pooled_point_median(scaled);
            p = PwgParams{bw, cfg.c, cfg.delta, cfg.tau};
            params = {{"bandwidth", bw}, {"c", cfg.c}, {"delta", cfg.delta}, {"tau", cfg.tau}};
            break;
        }
        case KernelKind::sw: {
            double sigma = 0.0;
            if (cfg.sigma) {
                sigma = *cfg.sigma;
            } else {
                const auto dist = sliced_wasserstein_matrix(scaled, cfg.n_slices, cfg.jobs);
                sigma = median_heuristic(dist.values());
            }
            p = SwParams{sigma, cfg.n_slices};
            params = {{"sigma", sigma}, {"n_slices", cfg.n_slices}};
            break;
        }
    }
    const DiagramKernel kernel(p, cfg.scaling);
    const auto k = gram_matrix(kernel, set.diagrams, cfg.jobs);

    const auto out = resolve_output(cfg.out);
    write_gram_csv(out, k);
    json sidecar = {{"kernel", to_string(cfg.kind)},
                    {"params", params},
                    {"scaling", scaling_json(cfg.scaling)},
                    {"dim", cfg.dim},
                    {"essential", cfg.essential_cap ? json({{"cap", *cfg.essential_cap}}) : json("drop")},
                    {"samples", set.ids},
                    {"labels", set.labels},
                    {"diagram_set_hash", hex64(diagram_set_hash(set.diagrams))}};
    auto sidecar_path = out;
    sidecar_path += ".json";
    write_text(sidecar_path, sidecar.dump(2) + "\n");
    return {{"out", out.string()}, {"sidecar", sidecar_path.string()}, {"rows", k.rows()}};
}

json cross_validate_command(const CrossValidateConfig& cfg) {
    const auto set = load_diagram_set(resolve_input(cfg.diagrams), cfg.dim);
    std::vector<std::string> classes;
    const auto y = encode_labels(set.labels, &classes);
    std::vector<std::size_t> all(set.diagrams.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

    const auto t0 = Clock::now();
    auto scaled = std::make_shared<const std::vector<PersistenceDiagram>>(
        scaled_subset(set.diagrams, all, cfg.scaling, cfg.top_k));
    const auto grid = make_grid(cfg.kind, cfg.grid, scaled, cfg.jobs);
    const auto cv = cross_validate(grid.producer, grid.labels, cfg.grid.boxes, y, cfg.folds, cfg.seed);
    const double seconds = seconds_since(t0);

    json report = {{"kernel", to_string(cfg.kind)},
                   {"scaling", scaling_json(cfg.scaling)},
                   {"dim", cfg.dim},
                   {"top_k", cfg.top_k},
                   {"folds", cfg.folds},
                   {"seed", cfg.seed},
                   {"classes", classes},
                   {"samples", set.ids},
                   {"grid", grid_json(cfg.grid, cfg.kind)},
                   {"cv", cv_json(cv, grid)},
                   {"validation_seconds", seconds}};
    const auto out = resolve_output(cfg.out);
    write_text(out, report.dump(2) + "\n");
    return {{"out", out.string()},
            {"selected", report["cv"]["selected"]},
            {"validation_seconds", seconds}};
}

json run_experiment(const ExperimentConfig& cfg) {
    if (!(cfg.split > 0.0 && cfg.split < 1.0)) throw InputError("run-experiment: split must lie in (0,1)");
    if (cfg.repetitions == 0) throw InputError("run-experiment: repetitions must be >= 1");
    if (cfg.kernels.empty()) throw InputError("run-experiment: no kernels");
    const auto out = resolve_output(cfg.out);

    fs::path diagram_dir;
    if (cfg.orbits) {
        if (cfg.orbits->orbits_per_label < cfg.folds)
            throw InputError("run-experiment: orbits_per_label must be at least the number of folds");
        auto orbits = *cfg.orbits;
        orbits.out = out / "diagrams";
        if (orbits.jobs == 0) orbits.jobs = cfg.jobs;
        generate_orbits(orbits);
        diagram_dir = orbits.out;
    } else if (cfg.diagrams) {
        diagram_dir = resolve_input(*cfg.diagrams);
    } else {
        throw InputError("run-experiment: give 'diagrams' or 'orbits'");
    }

    const auto set = load_diagram_set(diagram_dir, cfg.dim);
    std::vector<std::string> classes;
    const auto y = encode_labels(set.labels, &classes);
    if (classes.size() < 2) throw InputError("run-experiment: need at least two classes");

    struct Row {
        KernelKind kind;
        ScalingFunction scaling;
        std::vector<json> runs;
        std::vector<double> accuracy, f1, seconds;
    };
    std::vector<Row> rows;
    for (auto k : cfg.kernels) {
        rows.push_back({k, ScalingFunction::none(), {}, {}, {}, {}});
        for (const auto& s : cfg.scalings) rows.push_back({k, s, {}, {}, {}, {}});
    }

    const auto total_start = Clock::now();
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
        const auto split = stratified_split(y, cfg.split, mix_seed(cfg.seed, 2 * rep));
        const auto cv_seed = mix_seed(cfg.seed, 2 * rep + 1);
        std::vector<int> y_train, y_test;
        for (auto i : split.train) y_train.push_back(y[i]);
        for (auto i : split.test) y_test.push_back(y[i]);

        for (auto& row : rows) {
            const auto where = row_name(row.kind, row.scaling) + " repetition " + std::to_string(rep);
            try {
                const auto t0 = Clock::now();
                auto train = std::make_shared<const std::vector<PersistenceDiagram>>(
                    scaled_subset(set.diagrams, split.train, row.scaling, cfg.top_k));
                const auto grid = make_grid(row.kind, cfg.grid, train, cfg.jobs);
                const auto cv = cross_validate(grid.producer, grid.labels, cfg.grid.boxes, y_train, cfg.folds, cv_seed);
                const double seconds = seconds_since(t0);

                const auto& best = cv.best();
                const auto& kernel = grid.kernels[best.kernel_index];
                const auto model = train_ovr(grid.producer(best.kernel_index), y_train, best.box);
                const auto test = scaled_subset(set.diagrams, split.test, row.scaling, cfg.top_k);
                const auto pred = predict_ovr(model, kernel_block(kernel, test, *train, cfg.jobs));
                const auto sc = scores(y_test, pred);

                std::string csv = "sample_id,true,predicted\n";
                for (std::size_t t = 0; t < split.test.size(); ++t)
                    csv += csv_field(set.ids[split.test[t]]) + "," + csv_field(classes[y_test[t]]) + "," +
                           csv_field(classes[pred[t]]) + "\n";
                write_text(out / "predictions" / (row_name(row.kind, row.scaling) + "_rep" + std::to_string(rep) + ".csv"),
                           csv);

                row.accuracy.push_back(sc.accuracy);
                row.f1.push_back(sc.f1);
                row.seconds.push_back(seconds);
                row.runs.push_back({{"repetition", rep},
                                    {"accuracy", sc.accuracy},
                                    {"f1", sc.f1},
                                    {"selected",
                                     {{"kernel", best.kernel_label},
                                      {"box", best.box},
                                      {"cv_accuracy", best.mean_accuracy},
                                      {"cv_f1", best.mean_f1}}},
                                    {"calibration", grid.calibration}});
            } catch (const InputError& e) {
                throw InputError(where + ": " + e.what());
            } catch (const ComputeError& e) {
                throw ComputeError(where + ": " + e.what());
            }
        }
    }

    const auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    const auto stdev = [&](const std::vector<double>& v) {
        const double m = mean(v);
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return std::sqrt(s / static_cast<double>(v.size()));
    };

    json report_rows = json::array(), timing_rows = json::array();
    std::string runs_csv = "kernel,scaling,aux,repetition,accuracy,f1,selected_kernel,box\n";
    std::string table;
    {
        char line[256];
        std::snprintf(line, sizeof line, "%-6s %-14s %-12s %-16s %-16s %s\n", "kernel", "scaling", "aux",
                      "accuracy", "f1", "validation time (s)");
        table += line;
    }
    for (const auto& row : rows) {
        json r = scaling_json(row.scaling);
        r["kernel"] = to_string(row.kind);
        r["name"] = row_name(row.kind, row.scaling);
        r["accuracy"] = mean(row.accuracy);
        r["accuracy_std"] = stdev(row.accuracy);
        r["f1"] = mean(row.f1);
        r["f1_std"] = stdev(row.f1);
        r["runs"] = row.runs;
        report_rows.push_back(r);
        timing_rows.push_back({{"name", row_name(row.kind, row.scaling)},
                               {"validation_seconds", row.seconds},
                               {"mean_validation_seconds", mean(row.seconds)}});
        for (std::size_t rep = 0; rep < row.runs.size(); ++rep) {
            const auto& run = row.runs[rep];
            runs_csv += to_string(row.kind) + "," + psi_label(row.scaling) + "," + aux_label(row.scaling) + "," +
                        std::to_string(rep) + "," + format_double(row.accuracy[rep]) + "," +
                        format_double(row.f1[rep]) + "," +
                        csv_field(run["selected"]["kernel"].get<std::string>()) + "," +
                        format_double(run["selected"]["box"].get<double>()) + "\n";
        }
        char line[256];
        std::snprintf(line, sizeof line, "%-6s %-14s %-12s %-16s %-16s %s\n", to_string(row.kind).c_str(),
                      psi_label(row.scaling).c_str(), aux_label(row.scaling).c_str(),
                      (fixed(mean(row.accuracy), 3) + " +- " + fixed(stdev(row.accuracy), 3)).c_str(),
                      (fixed(mean(row.f1), 3) + " +- " + fixed(stdev(row.f1), 3)).c_str(),
                      fixed(mean(row.seconds), 2).c_str());
        table += line;
    }

    json scalings = json::array();
    for (const auto& s : cfg.scalings) scalings.push_back(scaling_json(s));
    json kernels = json::array();
    for (auto k : cfg.kernels) kernels.push_back(to_string(k));
    json grids = json::object();
    for (auto k : cfg.kernels) grids[to_string(k)] = grid_json(cfg.grid, k);
    json report = {{"config",
                    {{"dim", cfg.dim},
                     {"top_k", cfg.top_k},
                     {"kernels", kernels},
                     {"scalings", scalings},
                     {"grids", grids},
                     {"repetitions", cfg.repetitions},
                     {"split", cfg.split},
                     {"folds", cfg.folds},
                     {"seed", cfg.seed}}},
                   {"classes", classes},
                   {"samples", set.ids.size()},
                   {"diagram_set_hash", hex64(diagram_set_hash(set.diagrams))},
                   {"rows", report_rows}};
    json timing = {{"rows", timing_rows}, {"total_seconds", seconds_since(total_start)}};

    write_text(out / "report.json", report.dump(2) + "\n");
    write_text(out / "runs.csv", runs_csv);
    write_text(out / "results.txt", table);
    write_text(out / "timing.json", timing.dump(2) + "\n");

    json summary_rows = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i)
        summary_rows.push_back({{"name", report_rows[i]["name"]},
                                {"accuracy", report_rows[i]["accuracy"]},
                                {"f1", report_rows[i]["f1"]},
                                {"mean_validation_seconds", timing_rows[i]["mean_validation_seconds"]}});
    return {{"out", out.string()}, {"rows", summary_rows}, {"table", table}};
}

json oracle_check(const OracleCheckConfig& cfg) {
    if (cfg.min_points < 1 || cfg.min_points > cfg.max_points || cfg.max_points > kOracleMaxPoints)
        throw InputError("oracle-check: need 1 <= min_points <= max_points <= " + std::to_string(kOracleMaxPoints));
    if (cfg.dims.empty()) throw InputError("oracle-check: no dimensions");
    for (int d : cfg.dims)
        if (d < 0) throw InputError("oracle-check: negative dimension");
    if (!(cfg.offset > 0.0)) throw InputError("oracle-check: offset must be positive");
    const int max_dim = *std::max_element(cfg.dims.begin(), cfg.dims.end());

    const auto t0 = Clock::now();
    Rng rng(cfg.seed);
    std::size_t checks = 0, path_mismatches = 0;
    json mismatches = json::array();
    for (std::size_t c = 0; c < cfg.clouds; ++c) {
        const auto n = cfg.min_points + rng.below(cfg.max_points - cfg.min_points + 1);
        std::vector<double> coords(2 * n);
        for (auto& x : coords) x = rng.uniform();
        const auto dm = pairwise_distances(PointCloud(coords, 2));
        const auto pairs = rips_persistence(dm, max_dim);

        auto generic = compute_persistence(build_rips_filtration(dm, max_dim));
        auto fast = pairs;
        const auto key = [](const PersistencePair& p) { return std::tuple(p.dimension, p.birth, p.death); };
        const auto by_key = [&](const PersistencePair& a, const PersistencePair& b) { return key(a) < key(b); };
        std::sort(generic.begin(), generic.end(), by_key);
        std::sort(fast.begin(), fast.end(), by_key);
        if (generic != fast) ++path_mismatches;

        std::set<double> critical{0.0};
        for (double v : dm.entries()) critical.insert(v);
        for (double radius : critical) {
            for (double eps : {radius - cfg.offset, radius, radius + cfg.offset}) {
                if (eps < 0.0) continue;
                for (int r : cfg.dims) {
                    int from_pairs = 0;
                    for (const auto& p : pairs)
                        if (p.dimension == r && p.birth <= eps && eps < p.death) ++from_pairs;
                    const int oracle = betti_number_oracle(dm, eps, r);
                    ++checks;
                    if (from_pairs != oracle)
                        mismatches.push_back({{"cloud", c}, {"points", n}, {"eps", eps}, {"dim", r},
                                              {"from_pairs", from_pairs}, {"oracle", oracle}});
                }
            }
        }
    }
    json result = {{"clouds", cfg.clouds},
                   {"checks", checks},
                   {"mismatches", mismatches},
                   {"path_mismatches", path_mismatches},
                   {"passed", mismatches.empty() && path_mismatches == 0},
                   {"seconds", seconds_since(t0)}};
    if (cfg.out) write_text(resolve_output(*cfg.out), result.dump(2) + "\n");
    return result;
}

json run_command(const std::string& command, const json& config) {
    if (command == "generate-orbits") return generate_orbits(GenerateOrbitsConfig::from_json(config));
    if (command == "compute-diagrams") return compute_diagrams(ComputeDiagramsConfig::from_json(config));
    if (command == "gram") return gram(GramConfig::from_json(config));
    if (command == "cross-validate") return cross_validate_command(CrossValidateConfig::from_json(config));
    if (command == "run-experiment") return run_experiment(ExperimentConfig::from_json(config));
    if (command == "oracle-check") return oracle_check(OracleCheckConfig::from_json(config));
    throw InputError("unknown command '" + command + "'");
}

}  // namespace vspk
