#pragma once

#include <stdexcept>
#include <string>

namespace dreg {

// Invalid user-supplied values (dimensions, ranges, malformed files).
struct input_error : std::runtime_error {
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Inner-product blocks that cannot come from a valid Gram matrix.
struct geometry_error : std::runtime_error {
    explicit geometry_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Iterative fit blew up (step size too large for the Gram at hand).
struct divergence_error : std::runtime_error {
    explicit divergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Linear solve on a numerically singular system.
struct conditioning_error : std::runtime_error {
    explicit conditioning_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad experiment configuration (unknown keys, inconsistent sections).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dreg
