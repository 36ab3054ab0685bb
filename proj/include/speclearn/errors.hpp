#pragma once

#include <stdexcept>
#include <string>

namespace speclearn {

/// Rejection sampling could not place an object within the attempt cap.
struct PlacementFailure : std::runtime_error {
    explicit PlacementFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Demonstration synthesis could not fill a required label bucket.
struct SynthesisFailure : std::runtime_error {
    explicit SynthesisFailure(const std::string& what) : std::runtime_error(what) {}
};

/// A file exists but its contents do not match the expected schema/version.
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace speclearn
