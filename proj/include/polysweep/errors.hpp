#ifndef POLYSWEEP_ERRORS_HPP
#define POLYSWEEP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace polysweep {

// Error taxonomy. Every throw site uses one of these so callers (CLI, tests)
// can map failures to exit codes without string matching.

struct dimension_mismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A point claimed to lie in C(t) violates a row beyond tolerance.
struct infeasible_point : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The polyhedron C(t) has no point (detected during projection).
struct empty_set : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// normal_decompose could not certify membership in the normal cone.
struct decomposition_failed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Optimizer could not produce an endpoint-feasible candidate.
struct no_feasible_point : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reference trajectory cannot be aligned with the candidate grid.
struct incompatible_reference : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Backward sweep hit a rank-deficient per-step system under LICQ.
struct singular_adjoint_step : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Coderivative domain check requested with dependent generating vectors.
struct licq_violated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Spec / trajectory file parse problems (CLI maps these to exit code 2).
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace polysweep

#endif
