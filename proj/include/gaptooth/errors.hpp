/**
 * @file errors.hpp
 * @brief Exception types shared by the gap-tooth library.
 *
 * ConfigError signals invalid input (bad lattice geometry, unknown enum
 * names, malformed config files). NumericalError signals a failure during
 * evaluation or integration (non-positive depth, step-size underflow, QR
 * non-convergence). The CLI maps them to exit codes 2 and 3.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace gaptooth {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gaptooth
