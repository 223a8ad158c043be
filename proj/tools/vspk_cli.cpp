// Command-line front end. Every flag maps onto a key of the subcommand's JSON
// config; flags override values read from --config.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vspk/vspk.h"

namespace {

using json = nlohmann::json;

enum class Kind { text, integer, real, reals, integers, texts };

struct Binding {
    CLI::Option* option;
    std::string key;
    Kind kind;
    std::vector<std::string> values;
};

struct Subcommand {
    CLI::App* app = nullptr;
    std::string config_file;
    std::vector<std::unique_ptr<Binding>> bindings;

    void bind(const std::string& flag, const std::string& key, Kind kind, const std::string& help) {
        auto b = std::make_unique<Binding>();
        b->key = key;
        b->kind = kind;
        if (kind == Kind::reals || kind == Kind::integers || kind == Kind::texts)
            b->option = app->add_option(flag, b->values, help)->delimiter(',');
        else
            b->option = app->add_option(flag, b->values, help)->expected(1);
        bindings.push_back(std::move(b));
    }
};

json convert(const Binding& b) {
    const auto scalar = [&](const std::string& s) -> json {
        std::size_t used = 0;
        switch (b.kind) {
            case Kind::integer:
            case Kind::integers: {
                const long long v = std::stoll(s, &used);
                if (used != s.size()) throw std::invalid_argument(s);
                if (v < 0) return v;
                return static_cast<unsigned long long>(v);
            }
            case Kind::real:
            case Kind::reals: {
                const double v = std::stod(s, &used);
                if (used != s.size()) throw std::invalid_argument(s);
                return v;
            }
            default: return s;
        }
    };
    try {
        if (b.kind == Kind::reals || b.kind == Kind::integers || b.kind == Kind::texts) {
            json arr = json::array();
            for (const auto& v : b.values) arr.push_back(scalar(v));
            return arr;
        }
        return scalar(b.values.front());
    } catch (const std::logic_error&) {
        throw CLI::ValidationError(b.option->get_name(), "invalid value");
    }
}

int exit_code(vspk_status s) {
    switch (s) {
        case VSPK_OK: return 0;
        case VSPK_INPUT_ERROR: return 1;
        default: return 2;
    }
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return json::parse(ss.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Persistence diagrams, persistence kernels and variably scaled kernels for SVM classification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(vspk_version()));

    std::map<std::string, Subcommand> subs;
    const auto add = [&](const std::string& name, const std::string& help) -> Subcommand& {
        auto& s = subs[name];
        s.app = app.add_subcommand(name, help);
        s.app->add_option("--config", s.config_file, "JSON config file")->check(CLI::ExistingFile);
        return s;
    };
    const auto common = [](Subcommand& s, bool seeded) {
        s.bind("--out", "out", Kind::text, "output path (relative paths resolve against $VSPK_OUTPUT_ROOT)");
        s.bind("--jobs", "jobs", Kind::integer, "worker threads (0 = all cores)");
        if (seeded) s.bind("--seed", "seed", Kind::integer, "random seed");
    };
    const auto scaling = [](Subcommand& s) {
        s.bind("--scaling", "scaling", Kind::text, "none|augment|compress");
        s.bind("--rho", "rho", Kind::integer, "points kept by compress");
        s.bind("--aux", "aux", Kind::text, "centre: mass|persistence");
    };
    const auto grid = [](Subcommand& s) {
        s.bind("--boxes", "boxes", Kind::reals, "SVM box constraints");
        s.bind("--pss-sigmas", "pss_sigmas", Kind::reals, "PSS sigma grid");
        s.bind("--pwg-c", "pwg_c", Kind::reals, "PWG C grid");
        s.bind("--pwg-tau", "pwg_tau", Kind::reals, "PWG tau grid");
        s.bind("--delta", "delta", Kind::integer, "PWG weight exponent");
        s.bind("--sw-multipliers", "sw_multipliers", Kind::reals, "SW sigma grid, multiples of the median distance");
        s.bind("--n-slices", "n_slices", Kind::integer, "SW directions");
    };

    auto& gen = add("generate-orbits", "sample linked twisted map orbits and compute their H1 diagrams");
    common(gen, true);
    gen.bind("--labels", "labels", Kind::reals, "map parameters r, one class each");
    gen.bind("--orbits-per-label", "orbits_per_label", Kind::integer, "orbits per class");
    gen.bind("--points", "points", Kind::integer, "points per orbit");
    gen.bind("--top-k", "top_k", Kind::integer, "keep the k most persistent pairs (0 = all)");
    gen.bind("--threshold", "threshold", Kind::real, "Rips threshold (default: enclosing radius)");
    gen.bind("--simplex-cap", "simplex_cap", Kind::integer, "maximum number of simplices");

    auto& diag = add("compute-diagrams", "compute Rips persistence diagrams of CSV point clouds");
    common(diag, false);
    diag.bind("--input", "input", Kind::text, "directory of point-cloud CSV files");
    diag.bind("--labels-file", "labels_file", Kind::text, "CSV file,label");
    diag.bind("--max-dim", "max_dim", Kind::integer, "maximal homology dimension");
    diag.bind("--threshold", "threshold", Kind::real, "Rips threshold (default: enclosing radius)");
    diag.bind("--dims", "dims", Kind::integers, "dimensions to write");
    diag.bind("--simplex-cap", "simplex_cap", Kind::integer, "maximum number of simplices");

    auto& gram = add("gram", "write the Gram matrix of a diagram directory");
    common(gram, false);
    gram.bind("--diagrams", "diagrams", Kind::text, "diagram directory");
    gram.bind("--dim", "dim", Kind::integer, "homology dimension");
    gram.bind("--kernel", "kernel", Kind::text, "pss|pwg|sw");
    gram.bind("--sigma", "sigma", Kind::real, "PSS/SW bandwidth");
    gram.bind("--bandwidth", "bandwidth", Kind::real, "PWG Gaussian bandwidth");
    gram.bind("--c", "c", Kind::real, "PWG weight constant");
    gram.bind("--delta", "delta", Kind::integer, "PWG weight exponent");
    gram.bind("--tau", "tau", Kind::real, "PWG outer bandwidth");
    gram.bind("--n-slices", "n_slices", Kind::integer, "SW directions");
    gram.bind("--essential-cap", "essential_cap", Kind::real, "replace infinite deaths by this value");
    scaling(gram);

    auto& cv = add("cross-validate", "grid search with stratified k-fold cross validation");
    common(cv, true);
    cv.bind("--diagrams", "diagrams", Kind::text, "diagram directory");
    cv.bind("--dim", "dim", Kind::integer, "homology dimension");
    cv.bind("--top-k", "top_k", Kind::integer, "keep the k most persistent pairs (0 = all)");
    cv.bind("--kernel", "kernel", Kind::text, "pss|pwg|sw");
    cv.bind("--folds", "folds", Kind::integer, "number of folds");
    scaling(cv);
    grid(cv);

    auto& exp = add("run-experiment", "repeated split / cross-validate / test experiment");
    common(exp, true);
    exp.bind("--diagrams", "diagrams", Kind::text, "diagram directory (default: generate orbits)");
    exp.bind("--dim", "dim", Kind::integer, "homology dimension");
    exp.bind("--top-k", "top_k", Kind::integer, "keep the k most persistent pairs (0 = all)");
    exp.bind("--kernels", "kernels", Kind::texts, "kernels to compare");
    exp.bind("--repetitions", "repetitions", Kind::integer, "random splits");
    exp.bind("--split", "split", Kind::real, "training fraction");
    exp.bind("--folds", "folds", Kind::integer, "number of folds");
    scaling(exp);
    grid(exp);
    exp.bind("--orbits-per-label", "orbits.orbits_per_label", Kind::integer, "generated orbits per class");
    exp.bind("--points", "orbits.points", Kind::integer, "points per generated orbit");
    exp.bind("--labels", "orbits.labels", Kind::reals, "map parameters of the generated classes");

    auto& oracle = add("oracle-check", "compare persistence against brute-force Betti numbers");
    oracle.bind("--out", "out", Kind::text, "write the result JSON here");
    oracle.bind("--seed", "seed", Kind::integer, "random seed");
    oracle.bind("--clouds", "clouds", Kind::integer, "random clouds");
    oracle.bind("--min-points", "min_points", Kind::integer, "smallest cloud");
    oracle.bind("--max-points", "max_points", Kind::integer, "largest cloud");
    oracle.bind("--dims", "dims", Kind::integers, "homology dimensions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    for (auto& [name, sub] : subs) {
        if (!sub.app->parsed()) continue;
        json config;
        try {
            config = load_config(sub.config_file);
            if (!config.is_object()) throw std::runtime_error("config must be a JSON object");
            for (const auto& b : sub.bindings) {
                if (b->option->count() == 0) continue;
                const auto dot = b->key.find('.');
                if (dot == std::string::npos) {
                    config[b->key] = convert(*b);
                } else {
                    auto& parent = config[b->key.substr(0, dot)];
                    if (parent.is_null()) parent = json::object();
                    parent[b->key.substr(dot + 1)] = convert(*b);
                }
            }
            if (name == "run-experiment") {
                // The scaling flags select the variably scaled rows compared
                // against the unscaled baseline.
                json row = json::object();
                for (const char* k : {"scaling", "rho", "aux"}) {
                    if (config.contains(k)) {
                        row[k] = config[k];
                        config.erase(k);
                    }
                }
                if (!row.empty()) config["scalings"] = json::array({row});
                if (!config.contains("diagrams") && !config.contains("orbits")) config["orbits"] = json::object();
                if (config.contains("orbits") && !config["orbits"].contains("jobs") && config.contains("jobs"))
                    config["orbits"]["jobs"] = config["jobs"];
            }
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 1;
        }

        char* result = nullptr;
        const auto status = vspk_run_command(name.c_str(), config.dump().c_str(), &result);
        if (status != VSPK_OK) {
            std::fprintf(stderr, "error: %s\n", vspk_last_error());
            return exit_code(status);
        }
        auto summary = json::parse(result);
        vspk_string_free(result);
        if (summary.contains("table")) {
            std::cout << summary["table"].get<std::string>();
            summary.erase("table");
        }
        if (summary.contains("warnings"))
            for (const auto& w : summary["warnings"]) std::fprintf(stderr, "warning: %s\n", w.get<std::string>().c_str());
        std::cout << summary.dump(2) << "\n";
        if (name == "oracle-check" && !summary.value("passed", false)) return 2;
    }
    return 0;
}
