#pragma once

#include <cstdint>

#include "qtrank/quaternion.hpp"

namespace qtrank {

struct QuadraticOptions {
    std::uint64_t seed = 0x5eed;
    int starts = 32;
    int max_iterations = 80;
    double tol = 1e-10;        // residual acceptance, relative to the coefficient scale
    double re_eps = 1e-8;      // |Re x| threshold for "nonzero real part"
};

struct QuadraticRoot {
    Quaternion x;
    double residual = 0.0;
    int converged_starts = 0;
};

/// x^2 + alpha x + x beta - gamma.
Quaternion quadratic_residual(const Quaternion& alpha, const Quaternion& beta,
                              const Quaternion& gamma, const Quaternion& x);

/// Solves x^2 + alpha x + x beta = gamma by multi-start Newton on the four real
/// component equations. Among the converged roots the one with the largest
/// |Re x| is returned. Throws SolveBudgetExceeded when no start converges.
QuadraticRoot solve_quadratic(const Quaternion& alpha, const Quaternion& beta,
                              const Quaternion& gamma, const QuadraticOptions& opts = {});

}  // namespace qtrank
