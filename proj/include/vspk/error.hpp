#pragma once

#include <stdexcept>
#include <string>

namespace vspk {

/// Malformed or out-of-contract input (bad file, empty cloud, invalid parameter).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation that could not complete (blow-up guard, non-finite kernel value,
/// degenerate training set).
class ComputeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vspk
