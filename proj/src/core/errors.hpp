#pragma once

#include <stdexcept>
#include <string>

namespace ctiler {

/// File/decode problems: missing inputs, malformed PNGs, unwritable outputs.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad user configuration or CLI usage (maps to exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A classifier/segmenter failed; message carries tile context where known.
class BackendError : public std::runtime_error {
public:
    explicit BackendError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace ctiler
