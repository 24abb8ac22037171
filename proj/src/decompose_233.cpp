#include <cmath>

#include "decompose_internal.hpp"
#include "qtrank/spectral.hpp"

namespace qtrank::detail {

namespace {

Eigen::MatrixXd pair_mix_rows12(double c, double d) {
    Eigen::MatrixXd f = Eigen::MatrixXd::Identity(3, 3);
    f(1, 2) = c;
    f(2, 1) = d;
    return f;
}

}  // namespace

// Horizontal slices A (i = 0) and B (i = 1), each 3x3 in (j, k).
Decomposition core_233(const Tensor3& t, Ctx& ctx) {
    const Dims dims = t.dims();
    const double z = ctx.zero(t);
    const HMatrix h0 = t.horizontal(0), h1 = t.horizontal(1);
    if (slice_rank(h0, z) <= 2 && slice_rank(h1, z) <= 2) {
        Decomposition d = slice_terms(h0, 1, 0, dims, z);
        d.append(slice_terms(h1, 1, 1, dims, z));
        ctx.path = DecomposePath::P233Split;
        return d;
    }

    Work w(t, ctx);
    if (inverse_condition(h1) > inverse_condition(h0)) w.left(swap_matrix(2, 0, 1));

    // C = x0 A + B singular
    {
        const HMatrix a = w.t.horizontal(0), b = w.t.horizontal(1);
        LeftEigenOptions lo;
        lo.seed ^= ctx.seed;
        const LeftEigenResult le = left_eigen_search(b * h_inverse(a), lo, ctx.tol);
        w.left({{1.0, 0.0}, {le.x0, 1.0}});
    }
    // move the null direction of C into column 2
    {
        const HVector v = right_null_vector(w.t.horizontal(1));
        int p = 0;
        for (int k = 1; k < 3; ++k)
            if (v[k].norm() > v[p].norm()) p = k;
        HMatrix r(3, 3);
        int col = 0;
        for (int k = 0; k < 3; ++k)
            if (k != p) r(k, col++) = 1.0;
        for (int k = 0; k < 3; ++k) r(k, 2) = v[k];
        w.right(r);
    }
    Decomposition d;
    d.dims = dims;
    {
        double acol = 0.0;
        for (int j = 0; j < 3; ++j) acol = std::max(acol, w.t(0, j, 2).norm());
        if (acol <= ctx.zero(w.t)) {
            // A v = 0 cannot happen for invertible A; kept for completeness
            const Tensor3 sub = sub_tensor(w.t, {0, 1}, {0, 1, 2}, {0, 1});
            d = embed(core_232(sub, ctx), dims, {0, 1}, {0, 1, 2}, {0, 1});
            ctx.path = DecomposePath::P233ToP232;
            return w.finish(d);
        }
    }
    {
        int jm = 0;
        for (int j = 1; j < 3; ++j)
            if (w.t(0, j, 2).norm() > w.t(0, jm, 2).norm()) jm = j;
        if (jm != 0) w.real(real_swap(3, 0, jm));
    }
    {
        const Quaternion inv13 = q_inv(w.t(0, 0, 2));
        HMatrix r = HMatrix::identity(3);
        r(2, 0) = -(inv13 * w.t(0, 0, 0));
        r(2, 1) = -(inv13 * w.t(0, 0, 1));
        w.right(r);
    }
    const double z2 = ctx.zero(w.t);
    if (std::max(w.t(1, 0, 0).norm(), w.t(1, 0, 1).norm()) <= z2) {
        d.terms.push_back(fiber_term(w.t, 0, 2));
        d.terms.back().b = {w.t(0, 0, 2), 0.0, 0.0};
        const Tensor3 sub = sub_tensor(w.t, {0, 1}, {1, 2}, {0, 1, 2});
        d.append(embed(core_223(sub, ctx), dims, {0, 1}, {1, 2}, {0, 1, 2}));
        ctx.path = DecomposePath::P233FrontalSplit;
        return w.finish(d);
    }
    if (w.t(1, 0, 0).norm() > w.t(1, 0, 1).norm()) w.right(swap_matrix(3, 0, 1));
    {
        HMatrix r = HMatrix::identity(3);
        r(1, 0) = -(q_inv(w.t(1, 0, 1)) * w.t(1, 0, 0));
        w.right(r);
    }
    if (std::max(w.t(0, 1, 0).norm(), w.t(0, 2, 0).norm()) <= ctx.zero(w.t)) {
        // a zero first column of A cannot happen for invertible A either
        d.terms.push_back(fiber_term(w.t, 0, 1));
        d.terms.push_back(fiber_term(w.t, 0, 2));
        d.terms.push_back(fiber_term(w.t, 1, 0));
        d.terms.push_back(fiber_term(w.t, 1, 1));
        ctx.path = DecomposePath::P233Fiber;
        return w.finish(d);
    }
    {
        const PairMix mix = best_pair_mix(w.t(0, 1, 0), w.t(0, 2, 0));
        if (mix.c != 0.0 || mix.d != 0.0) w.real(pair_mix_rows12(mix.c, mix.d));
    }
    const Tensor3& s = w.t;
    SimpleTensor t1{unit_vector(2, 1), HVector(3), unit_vector(3, 1)};
    t1.b[0] = s(1, 0, 1);
    for (int j = 1; j < 3; ++j) {
        const Quaternion aj1 = s(0, j, 0), aj2 = s(0, j, 1), cj1 = s(1, j, 0), cj2 = s(1, j, 1);
        const Quaternion r = q_inv(aj1) * aj2;
        d.terms.push_back({{aj1, cj1}, unit_vector(3, j), {1.0, r, 0.0}});
        t1.b[j] = cj2 - cj1 * r;
    }
    d.terms.push_back(t1);
    SimpleTensor t4{unit_vector(2, 0), {s(0, 0, 2), s(0, 1, 2), s(0, 2, 2)}, unit_vector(3, 2)};
    d.terms.push_back(t4);
    ctx.path = DecomposePath::P233Main;
    return w.finish(d);
}

Decomposition core_332(const Tensor3& t, Ctx& ctx) {
    return conjugate_transpose(core_233(conjugate_transpose(t), ctx));
}

}  // namespace qtrank::detail
