#pragma once

#include <optional>
#include <string>

#include "vspk/diagram.hpp"

namespace vspk {

/// Weighted centre of the off-diagonal points of a diagram.
enum class CentreKind {
    uniform_mass,          // every point weighs 1/|D|
    persistence_weighted,  // every point weighs its persistence
};

enum class ScalingVariant {
    none,
    augment,   // D plus one added centre
    compress,  // rho most persistent points plus the centre of the rest
};

/// Diagram-to-diagram map used to build a variably scaled kernel.
struct ScalingFunction {
    ScalingVariant variant = ScalingVariant::none;
    int rho = 0;
    CentreKind centre = CentreKind::persistence_weighted;

    static ScalingFunction none() { return {}; }
    static ScalingFunction augment(CentreKind c) { return {ScalingVariant::augment, 0, c}; }
    /// InputError unless rho >= 1.
    static ScalingFunction compress(int rho, CentreKind c);

    friend bool operator==(const ScalingFunction&, const ScalingFunction&) = default;
};

/// Arithmetic mean of the stored points, counting multiplicity; nullopt for an
/// empty diagram.
std::optional<BirthDeath> centre_of_uniform_mass(const PersistenceDiagram& d);

/// Persistence-weighted mean; nullopt for an empty diagram.
std::optional<BirthDeath> centre_of_persistence(const PersistenceDiagram& d);

std::optional<BirthDeath> centre(const PersistenceDiagram& d, CentreKind kind);

/// augment: D with its centre appended (empty stays empty).
/// compress: the rho most persistent points (ties: smaller birth, then input
/// order) in input order, followed by the centre of the remaining points; D
/// itself when |D| <= rho.
PersistenceDiagram apply_scaling(const PersistenceDiagram& d, const ScalingFunction& s);

std::string to_string(ScalingVariant v);
std::string to_string(CentreKind c);
/// Accepts the CLI spellings: none|augment|compress and mass|persistence.
ScalingVariant parse_scaling_variant(const std::string& s);
CentreKind parse_centre_kind(const std::string& s);

}  // namespace vspk
