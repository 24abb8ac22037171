#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qtrank/hmatrix.hpp"
#include "qtrank/tolerance.hpp"

namespace qtrank {

using Dims = std::array<int, 3>;

std::string dims_string(const Dims& d);   // "2x3x2"

/// Order-3 quaternion array T[i][j][k] with dims (n1, n2, n3).
///
/// Slice convention: mode 2 counts frontal slices. Frontal slice j is the
/// n1 x n3 matrix (i,k), horizontal slice i is n2 x n3 in (j,k), lateral
/// slice k is n1 x n2 in (i,j). Readers used to mode-3 frontal slices should
/// swap the roles of the second and third index.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(const Dims& d);
    Tensor3(int n1, int n2, int n3) : Tensor3(Dims{n1, n2, n3}) {}

    const Dims& dims() const { return dims_; }
    int n1() const { return dims_[0]; }
    int n2() const { return dims_[1]; }
    int n3() const { return dims_[2]; }

    Quaternion& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
    const Quaternion& operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

    HMatrix frontal(int j) const;
    HMatrix horizontal(int i) const;
    HMatrix lateral(int k) const;
    void set_frontal(int j, const HMatrix& m);
    void set_horizontal(int i, const HMatrix& m);
    void set_lateral(int k, const HMatrix& m);

    double max_norm() const;
    bool is_complex(double tol = 0.0) const;

    Tensor3& operator+=(const Tensor3& o);
    Tensor3& operator-=(const Tensor3& o);
    friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
    friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
    friend bool operator==(const Tensor3&, const Tensor3&) = default;

    /// Frontal slices listed as matrices, the usual way of writing T down.
    static Tensor3 from_frontal(const std::vector<HMatrix>& slices);

private:
    std::size_t index(int i, int j, int k) const {
        return (std::size_t(i) * dims_[1] + j) * dims_[2] + k;
    }
    Dims dims_{0, 0, 0};
    std::vector<Quaternion> data_;
};

/// Largest entrywise quaternion-norm difference.
double max_abs_diff(const Tensor3& a, const Tensor3& b);

/// max_ijk |T - S| / (1 + max_ijk |T|).
double relative_error(const Tensor3& t, const Tensor3& s);

/// (a, b, c) with entry (i,j,k) = a_i b_j c_k, in that order.
struct SimpleTensor {
    HVector a;
    HVector b;
    HVector c;
    friend bool operator==(const SimpleTensor&, const SimpleTensor&) = default;
};

Tensor3 densify(const SimpleTensor& s);

struct Decomposition {
    Dims dims{0, 0, 0};
    std::vector<SimpleTensor> terms;
    double residual = 0.0;   // filled by verification against a target tensor

    std::size_t size() const { return terms.size(); }
    void append(const Decomposition& other);
};

Tensor3 densify(const Decomposition& d);

/// T'[k][j][i] = conj T[i][j][k]. Maps simple tensors to simple tensors
/// ((a,b,c) -> (conj c, conj b, conj a)) and is an involution.
Tensor3 conjugate_transpose(const Tensor3& t);
Decomposition conjugate_transpose(const Decomposition& d);

// Rank-preserving operations. Each carries its inverse, computed once when the
// op is built; construction throws SingularOp for a non-invertible matrix.

/// T'[i][j][k] = sum_m L[i][m] T[m][j][k].
struct LeftMode1 {
    HMatrix l;
    HMatrix l_inv;
};
/// T'[i][j][k] = sum_m T[i][j][m] R[m][k].
struct RightMode3 {
    HMatrix r;
    HMatrix r_inv;
};
/// T'[i][j][k] = sum_m F[j][m] T[i][m][k] with real F.
struct RealMode2 {
    Eigen::MatrixXd f;
    Eigen::MatrixXd f_inv;
};

using TensorOp = std::variant<LeftMode1, RightMode3, RealMode2>;

TensorOp left_mode1(const HMatrix& l);
TensorOp right_mode3(const HMatrix& r);
TensorOp real_mode2(const Eigen::MatrixXd& f);
/// Rejects matrices with a nonzero i, j or k part.
TensorOp real_mode2(const HMatrix& f);

TensorOp inverse(const TensorOp& op);

/// Ordered record of the ops applied to a working tensor.
class OpLog {
public:
    void push(TensorOp op) { ops_.push_back(std::move(op)); }
    std::size_t size() const { return ops_.size(); }
    bool empty() const { return ops_.empty(); }
    const std::vector<TensorOp>& ops() const { return ops_; }
    void append(const OpLog& other) { ops_.insert(ops_.end(), other.ops_.begin(), other.ops_.end()); }

private:
    std::vector<TensorOp> ops_;
};

/// Applies op without logging. Throws DimensionMismatch.
Tensor3 apply_op(const Tensor3& t, const TensorOp& op);
/// Applies op and appends it to log.
Tensor3 apply_op(const Tensor3& t, const TensorOp& op, OpLog& log);

Tensor3 replay(const Tensor3& t, const OpLog& log);
/// Applies the inverses in reverse order.
Tensor3 undo(const Tensor3& t, const OpLog& log);

/// Transforms each term through the inverse ops in reverse order, so that a
/// decomposition of replay(T, log) becomes one of T with the same term count.
SimpleTensor pullback(const SimpleTensor& s, const OpLog& log);
Decomposition pullback(const Decomposition& d, const OpLog& log);

/// Frontal slice j of densify(D) equals p * dks[j] * q.
struct PdqFactors {
    HMatrix p;                 // n1 x r, columns a_l
    std::vector<HMatrix> dks;  // n2 diagonal r x r matrices, (D_j)_ll = b_lj
    HMatrix q;                 // r x n3, rows c_l
};

PdqFactors pdq_factor(const Decomposition& d);
/// Throws DimensionMismatch for inconsistent shapes or non-diagonal dks.
Decomposition decomposition_from_pdq(const HMatrix& p, const std::vector<HMatrix>& dks, const HMatrix& q);

enum class CertVerdict { ExactlyN, MoreThanN, Inconclusive };
const char* to_string(CertVerdict v);

struct RankCertificate {
    CertVerdict verdict = CertVerdict::Inconclusive;
    int n = 0;
    std::optional<Decomposition> decomposition;   // ExactlyN only
    std::string reason;
};

/// For an n x p x n tensor with invertible first frontal slice A1: rank is
/// exactly n iff the slices A_j A1^{-1} are simultaneously diagonalizable.
RankCertificate rank_certificate_square(const Tensor3& t, const Tolerances& tol = default_tolerances,
                                        std::uint64_t seed = 1);

/// Writes the matrix a as a sum of rank(a) outer products by elimination and
/// lifts each to a simple tensor supported on one slice. mode_axis 1 places a
/// as horizontal slice `slot` (n2 x n3), 2 as frontal slice (n1 x n3), 3 as
/// lateral slice (n1 x n2).
Decomposition matrix_rank_decomp(const HMatrix& a, int mode_axis, int slot, const Dims& dims,
                                 double rel_tol = 1e-10);

/// Unit vector e_i of length n.
HVector unit_vector(int n, int i);

}  // namespace qtrank
