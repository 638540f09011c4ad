#pragma once

#include <stdexcept>
#include <string>

namespace canids {

// Input/format problems (unreadable streams, malformed files, schema
// mismatches). The CLI maps these to exit code 2.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Configuration/training problems (bad parameters, insufficient or
// degenerate data). The CLI maps these to exit code 3.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace canids
