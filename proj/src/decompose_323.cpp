#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "decompose_internal.hpp"
#include "qtrank/spectral.hpp"

namespace qtrank {

Perturbation323 perturbation_323(const Quaternion& w, int attempt) {
    // a u - b v = 0 on the unit circle; the sign flips with the attempt number
    const double a = w.w, b = w.x;
    const double n = std::hypot(a, b);
    Perturbation323 p;
    if (n == 0.0) {
        p.u = p.v = 1.0 / std::sqrt(2.0);
    } else {
        p.u = b / n;
        p.v = a / n;
    }
    if (attempt % 2 == 1) p.u = -p.u, p.v = -p.v;
    return p;
}

namespace detail {

namespace {

Eigen::MatrixXd mix_matrix(const double (&f)[4]) {
    Eigen::MatrixXd m(2, 2);
    m << f[0], f[1], f[2], f[3];
    return m;
}

// [a b e_pick] for the leading columns of A and B, with the unit vector that
// keeps it best conditioned.
HMatrix leading_basis(const Tensor3& t) {
    const HVector a = t.frontal(0).column(0), b = t.frontal(1).column(0);
    HMatrix m(3, 3);
    for (int r = 0; r < 3; ++r) m(r, 0) = a[r], m(r, 1) = b[r];
    double best = -1.0;
    int pick = 0;
    for (int e = 0; e < 3; ++e) {
        HMatrix c = m;
        c(e, 2) = 1.0;
        const double ic = inverse_condition(c);
        if (ic > best) best = ic, pick = e;
    }
    m(pick, 2) = 1.0;
    return m;
}

struct NormalStart {
    double score = 0.0;   // min inverse condition of the two pivot blocks
};

NormalStart normal_start(const Tensor3& t) {
    const HMatrix m = leading_basis(t);
    const double cm = inverse_condition(m);
    if (cm <= 1e-12) return {};
    const Tensor3 s = apply_op(t, left_mode1(h_inverse(m)));
    const HMatrix n = {{s(2, 0, 1), s(2, 0, 2)}, {s(2, 1, 1), s(2, 1, 2)}};
    return {std::min(cm, inverse_condition(n))};
}

Decomposition normal_form(Work& w, const Dims& dims, Ctx& ctx) {
    // first columns of A and B become e0 and e1
    w.left(h_inverse(leading_basis(w.t)));
    {
        const HMatrix n = {{w.t(2, 0, 1), w.t(2, 0, 2)}, {w.t(2, 1, 1), w.t(2, 1, 2)}};
        const HMatrix x = h_inverse(n) * swap_matrix(2, 0, 1);
        HMatrix r = HMatrix::identity(3);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) r(1 + a, 1 + b) = x(a, b);
        w.right(r);
    }
    {
        HMatrix r = HMatrix::identity(3);
        r(0, 1) = -w.t(0, 0, 1);
        w.right(r);
    }
    {
        HMatrix l = HMatrix::identity(3);
        l(1, 2) = -w.t(1, 0, 2);
        l(0, 2) = -w.t(0, 1, 1);
        w.left(l);
    }
    {
        HMatrix r = HMatrix::identity(3);
        r(0, 2) = -w.t(0, 0, 2);
        w.right(r);
    }
    {
        const Quaternion a22 = w.t(1, 0, 1);
        if (a22.norm() <= ctx.zero(w.t))
            throw Error(ErrorKind::AlgorithmFailure, "vanishing pivot");
        HMatrix l = HMatrix::identity(3);
        l(1, 1) = q_inv(a22);
        w.left(l);
    }

    const Quaternion wq = w.t(0, 1, 2);
    if (wq.norm() <= ctx.zero(w.t))
        throw Error(ErrorKind::AlgorithmFailure, "vanishing corner entry");
    static constexpr double scales[] = {1.0, 2.0, 0.5, 4.0, 0.25};
    for (int attempt = 0; attempt < 2; ++attempt) {
        const Perturbation323 pt = perturbation_323(wq, attempt);
        for (double sc : scales) {
            const Quaternion xp = sc * Quaternion{pt.u, pt.v, 0.0, 0.0};
            Tensor3 m = w.t;
            SimpleTensor extra{unit_vector(3, 1), unit_vector(2, 1), {w.t(1, 1, 0) - xp, w.t(1, 1, 1), w.t(1, 1, 2)}};
            m -= densify(extra);
            if (!is_diagonalizable(m.frontal(1) * h_inverse(m.frontal(0)), ctx.tol).diagonalizable) continue;
            const RankCertificate cert = rank_certificate_square(m, ctx.tol, ctx.seed);
            if (cert.verdict != CertVerdict::ExactlyN || !cert.decomposition) continue;
            Decomposition out;
            out.dims = dims;
            out.terms.push_back(extra);
            out.append(*cert.decomposition);
            // a nearly repeated eigenvalue leaves an ill-conditioned basis; try the next x'
            if (relative_error(w.t, densify(out)) > ctx.tol.verify) continue;
            ctx.path = DecomposePath::P323Normal;
            return w.finish(out);
        }
    }
    throw Error(ErrorKind::AlgorithmFailure, "perturbed slice did not diagonalize");
}

}  // namespace

// Frontal slices A (j = 0) and B (j = 1), each 3x3 in (i, k).
Decomposition core_323(const Tensor3& t, Ctx& ctx) {
    const Dims dims = t.dims();
    const double z = ctx.zero(t);
    Decomposition d;
    d.dims = dims;

    for (int j = 0; j < 2; ++j) {
        const HMatrix x = t.frontal(j);
        if (sigma_min(x) > z) continue;
        const HVector u = left_null_vector(x);
        int p = 0;
        for (int r = 1; r < 3; ++r)
            if (u[r].norm() > u[p].norm()) p = r;
        HMatrix l(3, 3);
        int row = 0;
        for (int r = 0; r < 3; ++r)
            if (r != p) l(row++, r) = 1.0;
        for (int r = 0; r < 3; ++r) l(2, r) = u[r];
        Work w(t, ctx);
        w.left(l);
        const int other = 1 - j;
        HVector c(3);
        for (int k = 0; k < 3; ++k) c[k] = w.t(2, other, k);
        d.terms.push_back({unit_vector(3, 2), unit_vector(2, other), c});
        const Tensor3 sub = sub_tensor(w.t, {0, 1}, {0, 1}, {0, 1, 2});
        d.append(embed(core_223(sub, ctx), dims, {0, 1}, {0, 1}, {0, 1, 2}));
        ctx.path = DecomposePath::P323SingularFrontal;
        return w.finish(d);
    }
    for (int i = 0; i < 3; ++i) {
        const HMatrix h = t.horizontal(i);
        if (slice_rank(h, z) > 1) continue;
        d = slice_terms(h, 1, i, dims, z, 1);
        const std::vector<int> is = iota_except(3, i);
        d.append(embed(core_223(sub_tensor(t, is, {0, 1}, {0, 1, 2}), ctx), dims, is, {0, 1}, {0, 1, 2}));
        ctx.path = DecomposePath::P323DeficientHorizontal;
        return d;
    }
    for (int k = 0; k < 3; ++k) {
        const HMatrix m = t.lateral(k);
        if (slice_rank(m, z) > 1) continue;
        d = slice_terms(m, 3, k, dims, z, 1);
        const std::vector<int> ks = iota_except(3, k);
        d.append(embed(core_322(sub_tensor(t, {0, 1, 2}, {0, 1}, ks), ctx), dims, {0, 1, 2}, {0, 1}, ks));
        ctx.path = DecomposePath::P323DeficientLateral;
        return d;
    }

    // Normal form (I; [[0,0,w],[x,y,z],[0,1,0]]). The reduction needs the
    // leading columns a, b of A and B independent and the 2x2 block they leave
    // in row 2 invertible; neither is implied by the tests above, so the start
    // (a real slice mix and a leading column) is searched and ranked.
    static const double mixes[][4] = {{1, 0, 0, 1}, {0, 1, 1, 0}, {1, 1, 0, 1}, {1, 0, 1, 1},
                                      {1, -1, 0, 1}, {1, 0, -1, 1}, {1, 2, 0, 1}, {1, 0, 2, 1}};
    struct Start {
        int mix, col;
        double score;
    };
    std::string last = "no admissible start";
    auto attempt = [&](const Start& st) -> std::optional<Decomposition> {
        try {
            Work w(t, ctx);
            if (st.mix != 0) w.real(mix_matrix(mixes[st.mix]));
            if (st.col != 0) w.right(swap_matrix(3, 0, st.col));
            Decomposition d = normal_form(w, dims, ctx);
            const double r = relative_error(t, densify(d));
            if (r <= ctx.tol.verify) return d;
            last = "residual " + std::to_string(r) + " after pullback";
            return std::nullopt;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::AlgorithmFailure && e.kind() != ErrorKind::Singular &&
                e.kind() != ErrorKind::SingularOp && e.kind() != ErrorKind::DivisionByZero)
                throw;
            last = e.what();
            return std::nullopt;
        }
    };
    // the unmixed start is usually fine; rank the others only when it is not
    if (normal_start(t).score >= 1e-3)
        if (auto d = attempt({0, 0, 0.0})) return *d;
    std::vector<Start> starts;
    for (int mi = 0; mi < 8; ++mi)
        for (int col = 0; col < 3; ++col) {
            Tensor3 s = apply_op(t, real_mode2(mix_matrix(mixes[mi])));
            if (col != 0) s = apply_op(s, right_mode3(swap_matrix(3, 0, col)));
            const NormalStart ns = normal_start(s);
            if (ns.score > 0.0) starts.push_back({mi, col, ns.score});
        }
    std::stable_sort(starts.begin(), starts.end(), [](const Start& a, const Start& b) { return a.score > b.score; });
    for (const Start& st : starts)
        if (auto d = attempt(st)) return *d;
    throw Error(ErrorKind::AlgorithmFailure, "3x2x3 normal form: " + last);
}

}  // namespace detail
}  // namespace qtrank
