#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qtrank/hmatrix.hpp"
#include "qtrank/tolerance.hpp"

namespace qtrank {

struct EigenCluster {
    Complex value;
    int algebraic = 0;
    int geometric = 0;
};

struct EigenReport {
    std::vector<Complex> eigenvalues;   // sorted by (real, imag)
    std::vector<EigenCluster> clusters;
    bool diagonalizable = false;
    std::optional<CMatrix> basis;       // eigenvector columns, present when diagonalizable
};

/// Eigenvalue clusters of a square complex matrix (dimension <= 8) with
/// multiplicities. Geometric multiplicity is the SVD nullity of C - lambda I.
EigenReport complex_eigen(const CMatrix& c, const Tolerances& tol = default_tolerances);

struct DiagonalizabilityReport {
    bool diagonalizable = false;
    EigenReport witness;
};

/// A is diagonalizable over H iff chi_A is diagonalizable over C.
DiagonalizabilityReport is_diagonalizable(const HMatrix& a, const Tolerances& tol = default_tolerances);

struct Diagonalization {
    HMatrix p;          // invertible; columns are right eigenvectors
    HVector diagonal;   // diagonal of p^{-1} a p
    double off_diagonal = 0.0;   // max off-diagonal entry of p^{-1} a p
    double condition = 0.0;      // sigma_max / sigma_min of chi_p
};

/// Constructs P with P^{-1} A P diagonal from eigenvector pairs of chi_A.
/// Returns nullopt when A is not diagonalizable or the certificate fails.
std::optional<Diagonalization> diagonalize(const HMatrix& a, const Tolerances& tol = default_tolerances);

/// Single right eigenpair A v = v lambda with complex lambda, Im lambda >= 0, |v| = 1.
struct RightEigenpair {
    HVector v;
    Complex lambda;
    double residual = 0.0;
};
RightEigenpair right_eigenpair(const HMatrix& a);

struct SchurForm {
    HMatrix u;   // unitary
    HMatrix t;   // upper triangular with complex diagonal, Im >= 0
};

/// A = U T U^* with U unitary over H.
SchurForm schur_triangularize(const HMatrix& a);

struct SimDiagResult {
    std::optional<HMatrix> p;   // present on success
    int attempts = 0;
};

/// One invertible P with P^{-1} M P diagonal for every M, tried on up to
/// eight seeded real combinations of the family.
SimDiagResult simultaneous_diagonalize(const std::vector<HMatrix>& ms, std::uint64_t seed = 1,
                                       const Tolerances& tol = default_tolerances);

struct LeftEigenOptions {
    std::uint64_t seed = 0x1ef7;
    int starts = 64;
    int simplex_iterations = 250;
};

struct LeftEigenResult {
    Quaternion x0;
    double sigma = 0.0;   // sigma_min of chi(x0 I + M)
};

/// Finds x0 with x0 I + M singular, i.e. -x0 is a left eigenvalue of M.
/// Throws SearchBudgetExceeded.
LeftEigenResult left_eigen_search(const HMatrix& m, const LeftEigenOptions& opts = {},
                                  const Tolerances& tol = default_tolerances);

}  // namespace qtrank
