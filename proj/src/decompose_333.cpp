#include <cmath>

#include "decompose_internal.hpp"
#include "qtrank/spectral.hpp"

namespace qtrank::detail {

// Horizontal slices A, B, C (i = 0, 1, 2), each 3x3 in (j, k).
Decomposition core_333(const Tensor3& t, Ctx& ctx) {
    const Dims dims = t.dims();
    const double z = ctx.zero(t);
    Decomposition d;
    d.dims = dims;

    int best = 0;
    double cbest = -1.0;
    bool all_deficient = true;
    for (int i = 0; i < 3; ++i) {
        const HMatrix h = t.horizontal(i);
        if (slice_rank(h, z) == 3) all_deficient = false;
        const double c = inverse_condition(h);
        if (c > cbest) cbest = c, best = i;
    }
    if (all_deficient) {
        for (int i = 0; i < 3; ++i) d.append(slice_terms(t.horizontal(i), 1, i, dims, z));
        ctx.path = DecomposePath::P333Split;
        return d;
    }

    Work w(t, ctx);
    if (best != 0) w.left(swap_matrix(3, 0, best));
    {
        const HMatrix a = w.t.horizontal(0), c = w.t.horizontal(2);
        LeftEigenOptions lo;
        lo.seed ^= ctx.seed;
        const LeftEigenResult le = left_eigen_search(c * h_inverse(a), lo, ctx.tol);
        HMatrix l = HMatrix::identity(3);
        l(2, 0) = le.x0;
        w.left(l);
    }
    const Tensor3 top = sub_tensor(w.t, {0, 1}, {0, 1, 2}, {0, 1, 2});
    d = embed(core_233(top, ctx), dims, {0, 1}, {0, 1, 2}, {0, 1, 2});
    d.append(slice_terms(w.t.horizontal(2), 1, 2, dims, ctx.zero(w.t), 2));
    ctx.path = DecomposePath::P333Reduce;
    return w.finish(d);
}

Decomposition core_333_complex(const Tensor3& t, const Ctx& ctx) {
    if (t.dims() != Dims{3, 3, 3})
        throw Error(ErrorKind::PreconditionViolated, "five-term formula needs a 3x3x3 tensor");
    const double scale = 1.0 + t.max_norm();
    const double z = ctx.tol.branch * scale;
    if (!t.is_complex(z)) throw Error(ErrorKind::PreconditionViolated, "five-term formula needs complex entries");

    // frontal slices A, B, C in (i, k); pattern entries that must be 0 or 1
    static constexpr int ones[][3] = {{0, 0, 2}, {2, 0, 0}, {1, 1, 2}, {2, 1, 1}};
    static constexpr int free_entries[][3] = {{0, 0, 0}, {1, 0, 1}, {0, 1, 0}, {1, 1, 1},
                                              {0, 2, 0}, {0, 2, 1}, {1, 2, 0}, {1, 2, 1}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                Quaternion target = 0.0;
                bool is_free = false;
                for (const auto& o : ones)
                    if (o[0] == i && o[1] == j && o[2] == k) target = 1.0;
                for (const auto& f : free_entries)
                    if (f[0] == i && f[1] == j && f[2] == k) is_free = true;
                if (!is_free && (t(i, j, k) - target).norm() > z)
                    throw Error(ErrorKind::PreconditionViolated, "tensor is not in the reduced 3x3x3 pattern");
            }

    auto cx = [&](int i, int j, int k) { return Complex(t(i, j, k).w, t(i, j, k).x); };
    auto q = [](Complex c) { return Quaternion::from_complex(c); };
    const Complex a11 = cx(0, 0, 0), a22 = cx(1, 0, 1), b11 = cx(0, 1, 0), b22 = cx(1, 1, 1);
    const Complex c11 = cx(0, 2, 0), c12 = cx(0, 2, 1), c21 = cx(1, 2, 0), c22 = cx(1, 2, 1);
    const Complex s = c11 * c22 - c12 * c21;
    const Complex r = a11 * c12 + b11 * c22;
    if (std::abs(a11) <= z || std::abs(b22) <= z || std::abs(c22) <= z || std::abs(r) <= z * scale)
        throw Error(ErrorKind::PreconditionViolated, "five-term formula needs A11, B22, C22 and R nonzero");

    Decomposition d;
    d.dims = t.dims();
    d.terms.push_back({unit_vector(3, 2), unit_vector(3, 0), {1.0, q(-a22 / b22), 0.0}});
    d.terms.push_back({{q(c12 / c22), 1.0, 0.0}, unit_vector(3, 2), {q(c21), q(c22), q(-s / r)}});
    d.terms.push_back({{0.0, 1.0, q(1.0 / b22)}, {q(a22), q(b22), 0.0}, unit_vector(3, 1)});
    d.terms.push_back({unit_vector(3, 0), {q(a11), q(b11), q(s / c22)}, {1.0, 0.0, q(1.0 / a11)}});
    d.terms.push_back({{q(-b11 / a11), 1.0, 0.0}, {0.0, 1.0, q(s / r)}, unit_vector(3, 2)});
    return d;
}

}  // namespace qtrank::detail
