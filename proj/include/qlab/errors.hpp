#pragma once

#include <stdexcept>
#include <string>

namespace qlab {

struct parameter_error : std::invalid_argument {
    explicit parameter_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Requested value is outside the domain where the closed form is defined
// (e.g. lambda == 1-p for the threshold formulas).
struct unsupported_parameter_error : std::domain_error {
    explicit unsupported_parameter_error(const std::string& msg) : std::domain_error(msg) {}
};

// A lookahead window (or similar forward scan) runs past the generated path.
struct insufficient_horizon_error : std::runtime_error {
    explicit insufficient_horizon_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Deletion requested at a slot that is not an arrival of the original path,
// or a malformed deletion sequence.
struct invalid_deletion_error : std::invalid_argument {
    explicit invalid_deletion_error(const std::string& msg) : std::invalid_argument(msg) {}
};

struct insufficient_data_error : std::runtime_error {
    explicit insufficient_data_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qlab
