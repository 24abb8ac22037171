#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "qtrank/quaternion.hpp"

namespace qtrank {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using HVector = std::vector<Quaternion>;

/// Dense row-major quaternion matrix.
class HMatrix {
public:
    HMatrix() = default;
    HMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols) {}
    HMatrix(std::initializer_list<std::initializer_list<Quaternion>> rows);

    static HMatrix identity(int n);
    static HMatrix diagonal(std::span<const Quaternion> d);
    static HMatrix from_column(std::span<const Quaternion> v);
    static HMatrix from_row(std::span<const Quaternion> v);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    Quaternion& operator()(int r, int c) { return data_[std::size_t(r) * cols_ + c]; }
    const Quaternion& operator()(int r, int c) const { return data_[std::size_t(r) * cols_ + c]; }

    HVector column(int c) const;
    HVector row(int r) const;
    void set_column(int c, std::span<const Quaternion> v);

    /// Conjugate transpose.
    HMatrix adjoint() const;
    HMatrix transpose() const;
    /// Largest entry norm.
    double max_norm() const;
    bool is_complex(double tol = 0.0) const;
    bool is_real(double tol = 0.0) const;

    HMatrix& operator+=(const HMatrix& o);
    HMatrix& operator-=(const HMatrix& o);
    friend HMatrix operator+(HMatrix a, const HMatrix& b) { return a += b; }
    friend HMatrix operator-(HMatrix a, const HMatrix& b) { return a -= b; }
    friend HMatrix operator*(const HMatrix& a, const HMatrix& b);
    friend HMatrix operator*(const Quaternion& s, const HMatrix& a);
    friend HMatrix operator*(const HMatrix& a, const Quaternion& s);
    friend HVector operator*(const HMatrix& a, std::span<const Quaternion> v);

    friend bool operator==(const HMatrix&, const HMatrix&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Quaternion> data_;
};

double max_abs_diff(const HMatrix& a, const HMatrix& b);

/// Complex adjoint [[A1, A2], [-conj A2, conj A1]] for A = A1 + A2 j.
CMatrix chi_adjoint(const HMatrix& a);

/// Maps (x; y) in C^{2n} to the quaternion vector x - conj(y) j. Satisfies
/// to_quaternion_vector(chi_A z) = A to_quaternion_vector(z) and commutes with
/// right multiplication by complex scalars.
HVector to_quaternion_vector(const CVector& z);
CVector to_complex_vector(std::span<const Quaternion> v);

/// Pivot count of row reduction by left multiplication, with largest-norm
/// pivoting and threshold rel_tol * max_norm(A).
int h_rank(const HMatrix& a, double rel_tol = 1e-10);

/// Throws NonSquare or Singular.
HMatrix h_inverse(const HMatrix& a, double rel_tol = 1e-10);

/// Smallest singular value of chi_A (each singular value of A appears twice).
double sigma_min(const HMatrix& a);
/// sigma_min / sigma_max of chi_A; 0 for the zero matrix.
double inverse_condition(const HMatrix& a);

/// Unit v minimizing |A v| (right-linear combination of columns).
HVector right_null_vector(const HMatrix& a);
/// Unit u minimizing |u^T A| (left-linear combination of rows).
HVector left_null_vector(const HMatrix& a);

/// Writes A = sum_l p_l q_l^T (entry (r,s) is the ordered product p_l[r] q_l[s])
/// by rank-one deflation with largest-norm pivots, stopping below
/// rel_tol * max_norm(A). The number of pairs is the numerical rank.
std::vector<std::pair<HVector, HVector>> rank_factorization(const HMatrix& a,
                                                            double rel_tol = 1e-10);

/// Solves A x = b for square invertible A.
HVector h_solve(const HMatrix& a, std::span<const Quaternion> b, double rel_tol = 1e-10);

}  // namespace qtrank
