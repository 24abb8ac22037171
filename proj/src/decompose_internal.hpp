#pragma once

#include <initializer_list>
#include <vector>

#include "qtrank/decompose.hpp"
#include "qtrank/error.hpp"

namespace qtrank::detail {

struct Ctx {
    Tolerances tol;
    std::uint64_t seed = 1;
    DecomposePath path = DecomposePath::Zero;
    double floor = 0.0;   // absolute size below which a whole sub-tensor is treated as zero
    bool replayed = false;   // some core pulled terms back through a nonempty op log

    /// Threshold for "this entry / singular value is zero" inside tensor t.
    double zero(const Tensor3& t) const { return std::max(tol.branch * t.max_norm(), floor); }
    double zero(double scale) const { return std::max(tol.branch * scale, floor); }
};

/// Working tensor plus the log of ops that produced it from the caller's tensor.
struct Work {
    Tensor3 t;
    OpLog log;
    Ctx* ctx;

    Work(Tensor3 start, Ctx& c) : t(std::move(start)), ctx(&c) {}
    void left(const HMatrix& l) { t = apply_op(t, left_mode1(l), log); }
    void right(const HMatrix& r) { t = apply_op(t, right_mode3(r), log); }
    void real(const Eigen::MatrixXd& f) { t = apply_op(t, real_mode2(f), log); }
    /// Decomposition of the working tensor mapped back to the starting tensor.
    Decomposition finish(const Decomposition& d) const {
        if (!log.empty()) ctx->replayed = true;
        return pullback(d, log);
    }
};

// Core routines: decomposition of exactly the tensor passed in (not verified).
Decomposition core_matrix(const Tensor3& t, Ctx& ctx);
Decomposition core_222(const Tensor3& t, Ctx& ctx);
Decomposition core_223(const Tensor3& t, Ctx& ctx);
Decomposition core_322(const Tensor3& t, Ctx& ctx);
Decomposition core_232(const Tensor3& t, Ctx& ctx);
Decomposition core_233(const Tensor3& t, Ctx& ctx);
Decomposition core_332(const Tensor3& t, Ctx& ctx);
Decomposition core_323(const Tensor3& t, Ctx& ctx);
Decomposition core_333(const Tensor3& t, Ctx& ctx);
/// Explicit complex formula; throws PreconditionViolated.
Decomposition core_232_complex(const Tensor3& t, const Ctx& ctx);
/// Five-term formula on the reduced complex 3x3x3 pattern; throws PreconditionViolated.
Decomposition core_333_complex(const Tensor3& t, const Ctx& ctx);
/// Shape routing for sub-tensors.
Decomposition core_any(const Tensor3& t, Ctx& ctx);

// Matrices for elementary ops.
HMatrix permutation(int n, std::initializer_list<int> to_from);   // row r of P*X is row to_from[r] of X
HMatrix swap_matrix(int n, int a, int b);
Eigen::MatrixXd real_swap(int n, int a, int b);

/// Sub-tensor on the given index lists, and the inverse embedding of a
/// decomposition of it (factor vectors padded with zeros).
Tensor3 sub_tensor(const Tensor3& t, const std::vector<int>& is, const std::vector<int>& js,
                   const std::vector<int>& ks);
Decomposition embed(const Decomposition& d, const Dims& full, const std::vector<int>& is,
                    const std::vector<int>& js, const std::vector<int>& ks);
std::vector<int> iota_except(int n, int skip);
std::vector<int> iota(int n);

/// Terms of a slice matrix by elimination, dropping remainders below abs_tol.
/// max_terms < 0 keeps every pivot above the threshold.
Decomposition slice_terms(const HMatrix& m, int mode_axis, int slot, const Dims& dims, double abs_tol,
                          int max_terms = -1);
/// Numerical rank with absolute threshold, consistent with slice_terms.
int slice_rank(const HMatrix& m, double abs_tol);

/// a = e_i, b = (T[i][j][k])_j, c = e_k.
SimpleTensor fiber_term(const Tensor3& t, int i, int k);
/// Adds the fiber terms of every (i, k) whose fiber is above the threshold.
void add_nonzero_fibers(Decomposition& d, const Tensor3& t, double abs_tol);

/// Best real frontal combination: F = [[1,c],[d,1]] maximising min(|x'|,|y'|) for
/// the pair (x, y) -> (x + c y, d x + y). Returns the coefficients.
struct PairMix {
    double c = 0.0;
    double d = 0.0;
    double score = 0.0;
};
PairMix best_pair_mix(const Quaternion& x, const Quaternion& y);

}  // namespace qtrank::detail
