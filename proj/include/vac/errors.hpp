#pragma once

#include <stdexcept>
#include <string>

namespace vac {

// Domain-specific failure modes. Precondition violations on user input use
// std::invalid_argument directly.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct degenerate_subspace_error : numerical_error {
    using numerical_error::numerical_error;
};

struct singular_mass_matrix_error : numerical_error {
    using numerical_error::numerical_error;
};

struct degenerate_solution_error : numerical_error {
    using numerical_error::numerical_error;
};

struct degenerate_projection_error : numerical_error {
    using numerical_error::numerical_error;
};

struct resolution_error : numerical_error {
    using numerical_error::numerical_error;
};

struct division_guard_error : numerical_error {
    using numerical_error::numerical_error;
};

struct insufficient_data_error : numerical_error {
    using numerical_error::numerical_error;
};

}  // namespace vac
