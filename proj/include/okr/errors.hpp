#pragma once

#include <stdexcept>
#include <string>

namespace okr {

// Bad caller input: malformed files, dimension mismatches, out-of-range
// parameters. CLI exit code 2.
struct input_error : std::invalid_argument {
    explicit input_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Step/label alternation violated. CLI exit code 3.
struct protocol_error : std::logic_error {
    explicit protocol_error(const std::string& msg) : std::logic_error(msg) {}
};

// Numerical breakdown: non-PSD Gram beyond tolerance, factorization failure
// that survives the fallback path. CLI exit code 4.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace okr
