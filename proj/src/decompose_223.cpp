#include "decompose_internal.hpp"

namespace qtrank::detail {

namespace {

// column k of frontal slice j as a 2-vector
HVector col(const Tensor3& t, int j, int k) { return {t(0, j, k), t(1, j, k)}; }

HMatrix pair_matrix(const HVector& u, const HVector& v) { return {{u[0], v[0]}, {u[1], v[1]}}; }

// Three lateral-slice terms for a tensor whose lateral slices each have rank <= 1.
Decomposition lateral_terms(const Tensor3& t, const Ctx& ctx) {
    Decomposition d;
    d.dims = t.dims();
    const double z = ctx.zero(t);
    for (int k = 0; k < t.n3(); ++k) {
        Decomposition s = slice_terms(t.lateral(k), 3, k, t.dims(), z, 1);
        d.append(s);
    }
    return d;
}

}  // namespace

Decomposition core_223(const Tensor3& t, Ctx& ctx) {
    const Dims dims = t.dims();
    const double z = ctx.zero(t);
    const HMatrix a0 = t.frontal(0), b0 = t.frontal(1);
    if (slice_rank(a0, z) <= 1 || slice_rank(b0, z) <= 1) {
        Decomposition d = slice_terms(a0, 2, 0, dims, z);
        d.append(slice_terms(b0, 2, 1, dims, z));
        ctx.path = DecomposePath::P223Split;
        return d;
    }

    Work w(t, ctx);
    // columns (p, q) of A with the best-conditioned 2x2 block go first
    int bp = 0, bq = 1;
    double best = -1.0;
    for (int p = 0; p < 3; ++p)
        for (int q = p + 1; q < 3; ++q) {
            const double c = inverse_condition(pair_matrix(col(t, 0, p), col(t, 0, q)));
            if (c > best) best = c, bp = p, bq = q;
        }
    const int br = 3 - bp - bq;
    if (!(bp == 0 && bq == 1)) w.right(permutation(3, {bp, bq, br}).transpose());

    // C3 -> C3 - C1 x1 - C2 x2 clears the third column of A
    {
        const HVector x = h_solve(pair_matrix(col(w.t, 0, 0), col(w.t, 0, 1)), col(w.t, 0, 2));
        HMatrix r = HMatrix::identity(3);
        r(0, 2) = -x[0];
        r(1, 2) = -x[1];
        w.right(r);
    }
    HVector g = col(w.t, 1, 2);
    if (std::max(g[0].norm(), g[1].norm()) <= ctx.zero(w.t)) {
        const Tensor3 sub = sub_tensor(w.t, {0, 1}, {0, 1}, {0, 1});
        Decomposition d = embed(core_222(sub, ctx), dims, {0, 1}, {0, 1}, {0, 1});
        ctx.path = DecomposePath::P223ToP222;
        return w.finish(d);
    }

    // make (e, g) the independent pair of B, swapping the first two columns if needed
    {
        const double ce = inverse_condition(pair_matrix(col(w.t, 1, 1), g));
        const double cd = inverse_condition(pair_matrix(col(w.t, 1, 0), g));
        if (cd > ce) w.right(swap_matrix(3, 0, 1));
    }
    // C1 -> C1 - C2 y1 - C3 y2 clears the first column of B
    {
        const HVector y = h_solve(pair_matrix(col(w.t, 1, 1), col(w.t, 1, 2)), col(w.t, 1, 0));
        HMatrix r = HMatrix::identity(3);
        r(1, 0) = -y[0];
        r(2, 0) = -y[1];
        w.right(r);
    }
    // now A = [h b 0], B = [0 e g]; e = h c1 + b c2, g = h c3 + b c4
    const HMatrix hb = pair_matrix(col(w.t, 0, 0), col(w.t, 0, 1));
    const HVector ec = h_solve(hb, col(w.t, 1, 1));
    const HVector gc = h_solve(hb, col(w.t, 1, 2));
    const Quaternion c1 = ec[0], c2 = ec[1], c3 = gc[0], c4 = gc[1];
    HMatrix r = HMatrix::identity(3);
    if (c3.norm() >= c4.norm()) {
        // C2 -> C2 - C3 c3^{-1} c1 leaves B's second column a multiple of b
        r(2, 1) = -(q_inv(c3) * c1);
        ctx.path = DecomposePath::P223ColumnC3;
    } else {
        // C2 -> C2 + C1 k1 + C3 k3 makes the second columns of A and B equal
        const Quaternion k3 = q_inv(c4) * (Quaternion{1.0} - c2);
        const Quaternion k1 = c1 + c3 * k3;
        r(0, 1) = k1;
        r(2, 1) = k3;
        ctx.path = DecomposePath::P223ColumnC4;
    }
    w.right(r);
    const DecomposePath path = ctx.path;
    Decomposition d = lateral_terms(w.t, ctx);
    ctx.path = path;
    return w.finish(d);
}

Decomposition core_322(const Tensor3& t, Ctx& ctx) {
    return conjugate_transpose(core_223(conjugate_transpose(t), ctx));
}

}  // namespace qtrank::detail
