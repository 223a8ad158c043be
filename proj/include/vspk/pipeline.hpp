#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vspk/kernels.hpp"
#include "vspk/persistence.hpp"
#include "vspk/scaling.hpp"

namespace vspk {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// Environment variable naming the directory that relative output paths are
/// resolved against.
inline constexpr const char* kOutputRootVar = "VSPK_OUTPUT_ROOT";

fs::path resolve_output(const fs::path& p);

struct GenerateOrbitsConfig {
    fs::path out = "orbits";
    std::vector<double> labels{2.5, 3.5, 4.0, 4.1, 4.3};
    std::size_t orbits_per_label = 20;
    std::size_t points = 300;
    std::uint64_t seed = 0;
    std::size_t top_k = 0;  // 0 keeps the full diagram
    std::optional<double> threshold;  // default: enclosing radius of each orbit
    std::size_t simplex_cap = kDefaultSimplexCap;
    unsigned jobs = 0;

    static GenerateOrbitsConfig from_json(const json& j);
};

struct ComputeDiagramsConfig {
    fs::path input;
    fs::path out = "diagrams";
    std::optional<fs::path> labels_file;  // CSV `file,label`
    int max_dim = 1;
    std::optional<double> threshold;
    std::vector<int> dims;  // default: 0..max_dim
    std::size_t simplex_cap = kDefaultSimplexCap;
    unsigned jobs = 0;

    static ComputeDiagramsConfig from_json(const json& j);
};

struct GramConfig {
    fs::path diagrams;
    fs::path out = "gram.csv";
    int dim = 1;
    KernelKind kind = KernelKind::pss;
    std::optional<double> sigma;      // PSS / SW; SW default: median pairwise SW distance
    std::optional<double> bandwidth;  // PWG Gaussian; default: pooled point median
    double c = 1.0;
    int delta = 10;
    double tau = 1.0;
    int n_slices = 10;
    ScalingFunction scaling;
    std::optional<double> essential_cap;
    unsigned jobs = 0;

    static GramConfig from_json(const json& j);
};

/// Hyperparameter grids; the defaults are the experiment grids.
struct GridConfig {
    std::vector<double> boxes;
    std::vector<double> pss_sigmas;
    std::vector<double> pwg_c;
    std::vector<double> pwg_tau;
    int pwg_delta = 10;
    std::vector<double> sw_multipliers;
    int n_slices = 10;

    static GridConfig defaults();
};

struct CrossValidateConfig {
    fs::path diagrams;
    fs::path out = "cv.json";
    int dim = 1;
    std::size_t top_k = 0;
    KernelKind kind = KernelKind::pss;
    ScalingFunction scaling;
    GridConfig grid = GridConfig::defaults();
    std::size_t folds = 5;
    std::uint64_t seed = 0;
    unsigned jobs = 0;

    static CrossValidateConfig from_json(const json& j);
};

struct ExperimentConfig {
    std::optional<fs::path> diagrams;              // existing diagram directory, or
    std::optional<GenerateOrbitsConfig> orbits;    // orbits generated into <out>/diagrams
    fs::path out = "experiment";
    int dim = 1;
    std::size_t top_k = 10;
    std::vector<KernelKind> kernels{KernelKind::pss, KernelKind::sw};
    std::vector<ScalingFunction> scalings;  // rows besides the unscaled baseline
    GridConfig grid = GridConfig::defaults();
    std::size_t repetitions = 10;
    double split = 0.7;
    std::size_t folds = 5;
    std::uint64_t seed = 0;
    unsigned jobs = 0;

    static std::vector<ScalingFunction> default_scalings();
    static ExperimentConfig from_json(const json& j);
};

struct OracleCheckConfig {
    std::size_t clouds = 50;
    std::size_t min_points = 5;
    std::size_t max_points = 8;
    std::vector<int> dims{0, 1};
    double offset = 1e-6;
    std::uint64_t seed = 0;
    std::optional<fs::path> out;

    static OracleCheckConfig from_json(const json& j);
};

/// Each command writes its artifacts and returns a JSON summary.
json generate_orbits(const GenerateOrbitsConfig& cfg);
json compute_diagrams(const ComputeDiagramsConfig& cfg);
json gram(const GramConfig& cfg);
json cross_validate_command(const CrossValidateConfig& cfg);
json run_experiment(const ExperimentConfig& cfg);
json oracle_check(const OracleCheckConfig& cfg);

/// Dispatches on the subcommand name ("generate-orbits", ...). InputError for
/// an unknown command or a malformed config.
json run_command(const std::string& command, const json& config);

/// Class ids for label strings: distinct labels sorted (numerically when all
/// parse as numbers), id = rank.
std::vector<int> encode_labels(const std::vector<std::string>& labels, std::vector<std::string>* classes = nullptr);

}  // namespace vspk
