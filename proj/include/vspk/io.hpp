#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vspk/geometry.hpp"
#include "vspk/gram.hpp"
#include "vspk/persistence.hpp"

namespace vspk {

namespace fs = std::filesystem;

/// Shortest round-trip decimal form; "inf" for +infinity.
std::string format_double(double v);

/// Parses a decimal or "inf"/"infinity" (case-insensitive). InputError otherwise.
double parse_double(const std::string& token);

/// One point per row, comma-separated coordinates, no header. Blank lines are
/// skipped; ragged rows and non-numeric fields are InputErrors naming the line.
PointCloud read_cloud_csv(const fs::path& path);
void write_cloud_csv(const fs::path& path, const PointCloud& cloud);

/// Header `dim,birth,death`, one row per pair, `inf` for essential deaths.
/// The reader accepts files with or without the header line.
std::vector<PersistencePair> read_pairs_csv(const fs::path& path);
void write_pairs_csv(const fs::path& path, const std::vector<PersistencePair>& pairs);

/// Dense row-major CSV.
void write_gram_csv(const fs::path& path, const GramMatrix& g);
GramMatrix read_gram_csv(const fs::path& path);

struct ManifestEntry {
    std::string id;
    std::string label;
    std::map<int, std::string> files;  // homology dimension -> file (relative to the manifest)
    bool flagged = false;
    std::string error;
};

/// Ordered sample list of a diagram directory. Manifest order is the sample
/// order of every downstream artifact.
struct Manifest {
    std::vector<ManifestEntry> samples;
};

inline constexpr const char* kManifestName = "manifest.json";

Manifest read_manifest(const fs::path& dir);
void write_manifest(const fs::path& dir, const Manifest& m);

struct DiagramSet {
    std::vector<std::string> ids;
    std::vector<std::string> labels;
    std::vector<PersistenceDiagram> diagrams;
};

/// Loads the dimension-`dim` diagram of every unflagged sample.
DiagramSet load_diagram_set(const fs::path& dir, int dim, EssentialPolicy policy = EssentialPolicy::drop());

/// FNV-1a 64-bit over a canonical text rendering of the diagrams.
std::uint64_t diagram_set_hash(const std::vector<PersistenceDiagram>& diagrams);

std::string hex64(std::uint64_t v);

/// Writes `text` to `path`, creating parent directories.
void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace vspk
