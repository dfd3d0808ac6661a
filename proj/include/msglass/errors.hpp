#pragma once

#include <stdexcept>

namespace msglass {

/// A bracketed solve or iterative scheme failed to produce a certified result.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Model is outside the domain of the requested solver.
struct UnsupportedModel : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace msglass
