#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace scdnn {

// Malformed configuration or data file.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A referenced (layer, implementation, metric) entry is missing or inconsistent.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// A table lookup failed (unknown configuration id or assignment signature).
struct LookupError : std::runtime_error {
    explicit LookupError(const std::string& msg) : std::runtime_error(msg) {}
};

// An enumeration would exceed the configured cap; carries the required count.
struct CapExceededError : std::runtime_error {
    CapExceededError(const std::string& msg, std::uint64_t required_count)
        : std::runtime_error(msg), required(required_count) {}
    std::uint64_t required;
};

}  // namespace scdnn
