#pragma once

#include <stdexcept>
#include <string>

namespace rg {

// Validation-class failure: bad configuration, malformed input file, shape or
// schema mismatch. The CLI maps these to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File could not be opened/read/written.
struct IoError : ConfigError {
    using ConfigError::ConfigError;
};

// A formula met a denominator (or radicand) it cannot evaluate. Raised, never
// a silent NaN. The CLI maps these to exit code 2.
struct DegenerateInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor shapes do not line up; the message names both shapes.
struct ShapeError : ConfigError {
    using ConfigError::ConfigError;
};

// Training diverged (non-finite loss) or another unrecoverable runtime fault.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rg
