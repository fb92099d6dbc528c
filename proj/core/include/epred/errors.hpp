#pragma once

#include <stdexcept>
#include <string>

namespace epred {

/// Mismatched descriptors or wrong coordinate lengths.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid or inconsistent configuration (CLI and builders).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure: non-finite state, kernel compatibility violation,
/// density below its validated floor.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace epred
