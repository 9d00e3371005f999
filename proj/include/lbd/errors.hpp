#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lbd {

// Bad parameters, flags, or out-of-range arguments.
struct invalid_argument_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Data incompatible with the selected model. `index` is the 0-based position
// of the first offending observation, or -1 when no single position applies.
struct invalid_data_error : std::runtime_error {
    std::int64_t index;
    invalid_data_error(const std::string& msg, std::int64_t idx = -1)
        : std::runtime_error(msg), index(idx) {}
};

// A changepoint geometry whose energy is below the detection threshold.
struct not_detectable_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The localization bound of the second branch degenerates (g(m) >= m).
struct unbounded_precision_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace lbd
