#pragma once

#include <stdexcept>
#include <string>

namespace mgrelay {

/// Bad input: out-of-range parameters, mismatched models, malformed scenario files.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The numbers broke down: singular systems, degenerate parallels, non-convergence.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mgrelay
