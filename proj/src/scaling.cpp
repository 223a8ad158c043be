#include "vspk/scaling.hpp"

#include <algorithm>
#include <vector>

#include "vspk/error.hpp"

namespace vspk {

ScalingFunction ScalingFunction::compress(int rho, CentreKind c) {
    if (rho < 1) throw InputError("compress scaling needs rho >= 1");
    return {ScalingVariant::compress, rho, c};
}

std::optional<BirthDeath> centre_of_uniform_mass(const PersistenceDiagram& d) {
    if (d.empty()) return std::nullopt;
    double b = 0.0, e = 0.0;
    for (const auto& p : d.pairs()) {
        b += p.birth;
        e += p.death;
    }
    const double n = static_cast<double>(d.size());
    return BirthDeath{b / n, e / n};
}

std::optional<BirthDeath> centre_of_persistence(const PersistenceDiagram& d) {
    if (d.empty()) return std::nullopt;
    double w = 0.0, b = 0.0, e = 0.0;
    for (const auto& p : d.pairs()) {
        const double pers = persistence(p);
        w += pers;
        b += pers * p.birth;
        e += pers * p.death;
    }
    return BirthDeath{b / w, e / w};
}

std::optional<BirthDeath> centre(const PersistenceDiagram& d, CentreKind kind) {
    return kind == CentreKind::uniform_mass ? centre_of_uniform_mass(d) : centre_of_persistence(d);
}

namespace {

// Centres of nearly-diagonal points can round onto the diagonal; such a point
// carries no mass and is left out.
void append_centre(std::vector<BirthDeath>& out, const std::optional<BirthDeath>& c) {
    if (c && c->death > c->birth) out.push_back(*c);
}

}  // namespace

PersistenceDiagram apply_scaling(const PersistenceDiagram& d, const ScalingFunction& s) {
    switch (s.variant) {
        case ScalingVariant::none:
            return d;
        case ScalingVariant::augment: {
            std::vector<BirthDeath> out(d.pairs().begin(), d.pairs().end());
            append_centre(out, centre(d, s.centre));
            return PersistenceDiagram(d.dimension(), std::move(out));
        }
        case ScalingVariant::compress: {
            if (s.rho < 1) throw InputError("compress scaling needs rho >= 1");
            const auto rho = static_cast<std::size_t>(s.rho);
            if (d.size() <= rho) return d;
            const auto order = persistence_order(d);
            std::vector<char> kept(d.size(), 0);
            for (std::size_t i = 0; i < rho; ++i) kept[order[i]] = 1;
            std::vector<BirthDeath> out, rest;
            for (std::size_t i = 0; i < d.size(); ++i) (kept[i] ? out : rest).push_back(d[i]);
            append_centre(out, centre(PersistenceDiagram(d.dimension(), std::move(rest)), s.centre));
            return PersistenceDiagram(d.dimension(), std::move(out));
        }
    }
    throw InputError("unknown scaling variant");
}

std::string to_string(ScalingVariant v) {
    switch (v) {
        case ScalingVariant::none: return "none";
        case ScalingVariant::augment: return "augment";
        case ScalingVariant::compress: return "compress";
    }
    return "?";
}

std::string to_string(CentreKind c) {
    return c == CentreKind::uniform_mass ? "mass" : "persistence";
}

ScalingVariant parse_scaling_variant(const std::string& s) {
    if (s == "none") return ScalingVariant::none;
    if (s == "augment") return ScalingVariant::augment;
    if (s == "compress") return ScalingVariant::compress;
    throw InputError("unknown scaling '" + s + "' (expected none|augment|compress)");
}

CentreKind parse_centre_kind(const std::string& s) {
    if (s == "mass") return CentreKind::uniform_mass;
    if (s == "persistence") return CentreKind::persistence_weighted;
    throw InputError("unknown auxiliary centre '" + s + "' (expected mass|persistence)");
}

}  // namespace vspk
