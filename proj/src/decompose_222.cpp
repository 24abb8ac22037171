#include "decompose_internal.hpp"

namespace qtrank::detail {

// Real row/column/frontal moves bring a well-sized pair (A11, B11) to the
// corner, then the three terms of the 2x2x2 proposition are read off.
Decomposition core_222(const Tensor3& t, Ctx& ctx) {
    Decomposition d;
    d.dims = t.dims();
    if (t.max_norm() <= ctx.floor) {
        ctx.path = DecomposePath::Zero;
        return d;
    }

    int bi = 0, bk = 0;
    PairMix best{0.0, 0.0, -1.0};
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
            const PairMix m = best_pair_mix(t(i, 0, k), t(i, 1, k));
            if (m.score > best.score * (1.0 + 1e-12)) best = m, bi = i, bk = k;
        }
    if (best.score <= ctx.zero(t))
        throw Error(ErrorKind::AlgorithmFailure, "2x2x2: no usable pivot in a nonzero tensor");

    Work w(t, ctx);
    if (best.c != 0.0 || best.d != 0.0) {
        Eigen::MatrixXd f(2, 2);
        f << 1.0, best.c, best.d, 1.0;
        w.real(f);
    }
    if (bi != 0) w.left(swap_matrix(2, 0, 1));
    if (bk != 0) w.right(swap_matrix(2, 0, 1));

    const Tensor3& s = w.t;
    const Quaternion a11 = s(0, 0, 0), a12 = s(0, 0, 1), a21 = s(1, 0, 0), a22 = s(1, 0, 1);
    const Quaternion b11 = s(0, 1, 0), b12 = s(0, 1, 1), b21 = s(1, 1, 0), b22 = s(1, 1, 1);
    const Quaternion ra = q_inv(a11) * a12;
    const Quaternion rb = q_inv(b11) * b12;

    d.terms.push_back({{a11, a21}, {1.0, 0.0}, {1.0, ra}});
    d.terms.push_back({{b11, b21}, {0.0, 1.0}, {1.0, rb}});
    d.terms.push_back({{0.0, 1.0}, {a22 - a21 * ra, b22 - b21 * rb}, {0.0, 1.0}});
    ctx.path = DecomposePath::P222Prop;
    return w.finish(d);
}

}  // namespace qtrank::detail
