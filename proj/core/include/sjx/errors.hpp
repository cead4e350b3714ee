#pragma once

#include <stdexcept>
#include <string>

namespace sjx {

// Bad user input: unknown labels, malformed configs, violated preconditions.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure failed its own error budget (non-convergence,
// trace drift, norm collapse, horizon too short).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sjx
