#pragma once

#include <stdexcept>
#include <string>

namespace gmcpos {

/// Input file could not be read or decoded.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input was decoded but violates a documented precondition.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Skeleton extraction produced no usable cells.
struct NoSkeletonError : ValidationError {
    explicit NoSkeletonError(const std::string& msg) : ValidationError(msg) {}
};

/// Graph-structure contract broken (disconnected input, bad indices, ...).
struct GraphError : std::runtime_error {
    explicit GraphError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace gmcpos
