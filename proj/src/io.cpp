#include "vspk/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vspk/error.hpp"

namespace vspk {

using json = nlohmann::json;

std::string format_double(double v) {
    if (v == kUnbounded) return "inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& token) {
    std::string t = token;
    t.erase(0, t.find_first_not_of(" \t\r"));
    t.erase(t.find_last_not_of(" \t\r") + 1);
    std::string lower = t;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "inf" || lower == "+inf" || lower == "infinity") return kUnbounded;
    double v = 0.0;
    const char* first = t.data();
    if (!t.empty() && t.front() == '+') ++first;
    const auto res = std::from_chars(first, t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw InputError("not a number: '" + token + "'");
    return v;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
    if (!out) throw InputError("write failed for " + path.string());
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

PointCloud read_cloud_csv(const fs::path& path) {
    std::istringstream in(read_text(path));
    std::vector<double> coords;
    std::size_t dim = 0, line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const auto fields = split_fields(line);
        if (dim == 0) dim = fields.size();
        if (fields.size() != dim)
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                             " coordinates, found " + std::to_string(fields.size()));
        for (const auto& f : fields) {
            try {
                coords.push_back(parse_double(f));
            } catch (const InputError& e) {
                throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
            }
        }
    }
    if (coords.empty()) return {};
    try {
        return PointCloud(std::move(coords), dim);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void write_cloud_csv(const fs::path& path, const PointCloud& cloud) {
    std::string text;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto p = cloud.point(i);
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (k) text += ',';
            text += format_double(p[k]);
        }
        text += '\n';
    }
    write_text(path, text);
}

std::vector<PersistencePair> read_pairs_csv(const fs::path& path) {
    std::istringstream in(read_text(path));
    std::vector<PersistencePair> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const auto fields = split_fields(line);
        if (line_no == 1 && !fields.empty() && fields[0].find("dim") != std::string::npos) continue;
        if (fields.size() != 3)
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected dim,birth,death");
        try {
            const double dim = parse_double(fields[0]);
            if (dim < 0 || dim != std::floor(dim) || dim > 64) throw InputError("bad dimension '" + fields[0] + "'");
            PersistencePair p{static_cast<int>(dim), parse_double(fields[1]), parse_double(fields[2])};
            if (!std::isfinite(p.birth) || p.birth < 0.0 || !(p.death > p.birth))
                throw InputError("pair is not a valid (birth < death) pair");
            pairs.push_back(p);
        } catch (const InputError& e) {
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return pairs;
}

void write_pairs_csv(const fs::path& path, const std::vector<PersistencePair>& pairs) {
    std::string text = "dim,birth,death\n";
    for (const auto& p : pairs)
        text += std::to_string(p.dimension) + ',' + format_double(p.birth) + ',' + format_double(p.death) + '\n';
    write_text(path, text);
}

void write_gram_csv(const fs::path& path, const GramMatrix& g) {
    std::string text;
    for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = 0; j < g.cols(); ++j) {
            if (j) text += ',';
            text += format_double(g(i, j));
        }
        text += '\n';
    }
    write_text(path, text);
}

GramMatrix read_gram_csv(const fs::path& path) {
    std::istringstream in(read_text(path));
    std::vector<double> values;
    std::size_t cols = 0, rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (blank(line)) continue;
        const auto fields = split_fields(line);
        if (rows == 0) cols = fields.size();
        if (fields.size() != cols) throw InputError(path.string() + ": ragged Gram matrix row");
        for (const auto& f : fields) values.push_back(parse_double(f));
        ++rows;
    }
    return GramMatrix(rows, cols, std::move(values));
}

Manifest read_manifest(const fs::path& dir) {
    const auto path = dir / kManifestName;
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    Manifest m;
    try {
        for (const auto& s : j.at("samples")) {
            ManifestEntry e;
            e.id = s.at("id").get<std::string>();
            e.label = s.value("label", "");
            for (const auto& [dim, file] : s.at("files").items()) e.files[std::stoi(dim)] = file.get<std::string>();
            e.flagged = s.value("flagged", false);
            e.error = s.value("error", "");
            m.samples.push_back(std::move(e));
        }
    } catch (const std::exception& e) {
        throw InputError(path.string() + ": malformed manifest: " + e.what());
    }
    return m;
}

void write_manifest(const fs::path& dir, const Manifest& m) {
    json samples = json::array();
    for (const auto& e : m.samples) {
        json files = json::object();
        for (const auto& [dim, file] : e.files) files[std::to_string(dim)] = file;
        json s = {{"id", e.id}, {"label", e.label}, {"files", files}, {"flagged", e.flagged}};
        if (!e.error.empty()) s["error"] = e.error;
        samples.push_back(std::move(s));
    }
    json j = {{"format", "vspk-diagram-set/1"}, {"samples", samples}};
    write_text(dir / kManifestName, j.dump(2) + "\n");
}

DiagramSet load_diagram_set(const fs::path& dir, int dim, EssentialPolicy policy) {
    const auto m = read_manifest(dir);
    DiagramSet set;
    for (const auto& e : m.samples) {
        if (e.flagged) continue;
        const auto it = e.files.find(dim);
        if (it == e.files.end())
            throw InputError("sample '" + e.id + "' has no dimension-" + std::to_string(dim) + " diagram");
        const auto pairs = read_pairs_csv(dir / it->second);
        set.ids.push_back(e.id);
        set.labels.push_back(e.label);
        set.diagrams.push_back(diagram_from_pairs(pairs, dim, policy));
    }
    return set;
}

std::uint64_t diagram_set_hash(const std::vector<PersistenceDiagram>& diagrams) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& d : diagrams) {
        feed("D" + std::to_string(d.dimension()) + ";");
        for (const auto& p : d.pairs()) feed(format_double(p.birth) + "," + format_double(p.death) + ";");
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace vspk
