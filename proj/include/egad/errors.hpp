#pragma once

#include <stdexcept>
#include <string>

namespace egad {

/// Malformed input structure: a cyclic genome, a mesh vertex with no faces,
/// a disconnected surface where one component is required.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The morphology pipeline produced no usable shape. This is an ordinary
/// evolutionary outcome; callers discard the individual and count it.
class RejectIndividual : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace egad
