#pragma once

#include <cstdint>

#include "qtrank/tensor.hpp"

namespace qtrank {

/// Which branch of the constructive argument produced a decomposition.
enum class DecomposePath {
    Zero,
    MatrixRoute,
    P222Prop,
    P223Split,
    P223ToP222,
    P223ColumnC3,
    P223ColumnC4,
    P232ToP222,
    P232Singular,
    P232SingularFiber,
    P232Diagonalizable,
    P232Schur,
    P232SchurTriangular,
    P232Complex,
    P233Split,
    P233ToP232,
    P233FrontalSplit,
    P233Fiber,
    P233Main,
    P323SingularFrontal,
    P323DeficientHorizontal,
    P323DeficientLateral,
    P323Normal,
    P333Split,
    P333Reduce,
    P333Complex,
};

const char* to_string(DecomposePath p);
inline constexpr int decompose_path_count = int(DecomposePath::P333Complex) + 1;

struct DecomposeOutcome {
    Decomposition decomposition;   // of the caller's tensor, residual filled in
    int bound = 0;
    DecomposePath path = DecomposePath::Zero;
    bool oplog_replayed = false;   // terms were pulled back through a nonempty op log
    int attempts = 1;              // core runs used; above 1 after a coarser threshold or a preconditioned retry
};

struct DecomposeOptions {
    Tolerances tol = default_tolerances;
    std::uint64_t seed = 1;
    /// Each attempt runs the core at branch tolerance x1, x10, x100 until one
    /// verifies. Extra attempts work on a randomly preconditioned copy (unitary mode-1 and
    /// mode-3 ops, orthogonal mode-2 op) when the direct run fails verification.
    int retries = 4;
};

/// Rank bound for a shape: {222,223,322,232}: 3, {233,332,323}: 4, 333: 6,
/// min of the other two dims when one dim is 1. Throws UnsupportedShape.
int shape_bound(const Dims& d);

DecomposeOutcome decompose_222(const Tensor3& t, const DecomposeOptions& opts = {});
/// Accepts 2x2x3 and 3x2x2 (the latter through the conjugate transpose).
DecomposeOutcome decompose_223(const Tensor3& t, const DecomposeOptions& opts = {});
DecomposeOutcome decompose_232(const Tensor3& t, const DecomposeOptions& opts = {});
/// Explicit three-term formula for complex 2x3x2 tensors with det M, det N != 0.
/// Throws PreconditionViolated otherwise.
DecomposeOutcome decompose_232_complex(const Tensor3& t, const DecomposeOptions& opts = {});
/// Accepts 2x3x3 and 3x3x2 (the latter through the conjugate transpose).
DecomposeOutcome decompose_233(const Tensor3& t, const DecomposeOptions& opts = {});
DecomposeOutcome decompose_323(const Tensor3& t, const DecomposeOptions& opts = {});
DecomposeOutcome decompose_333(const Tensor3& t, const DecomposeOptions& opts = {});
/// Five-term formula for complex 3x3x3 tensors already in the reduced pattern.
/// Throws PreconditionViolated when the pattern or the nonvanishing conditions fail.
DecomposeOutcome decompose_333_complex_subcase(const Tensor3& t, const DecomposeOptions& opts = {});

/// Routes by shape. Throws UnsupportedShape for any dimension above 3.
DecomposeOutcome dispatch(const Tensor3& t, const DecomposeOptions& opts = {});

/// The scalars of the complex 2x3x2 formula. With frontal slices X = A, B, C
/// and X1 = X(0,0), X2 = X(0,1), X3 = X(1,0), X4 = X(1,1):
/// sigma1 = det [X2 X3 X4], sigma2 = det [X1 X2 X4] and tau1, tau2 the
/// companion expansions, satisfying X2 tau1 - X1 sigma1 + X4 tau2 = X3 sigma2.
struct Complex232Scalars {
    Complex sigma1, sigma2, tau1, tau2;
};
Complex232Scalars complex_232_scalars(const Tensor3& t);

/// Real (u, v) with a u - b v = 0 on the unit circle for w = a + bi + cj + dk,
/// so that [[0,0,w],[u+vi,0,0],[0,1,0]] has six distinct adjoint eigenvalues.
/// attempt > 0 rotates to an alternative admissible choice.
struct Perturbation323 {
    double u = 1.0;
    double v = 0.0;
};
Perturbation323 perturbation_323(const Quaternion& w, int attempt = 0);

}  // namespace qtrank
