#include <algorithm>
#include <cmath>
#include <optional>

#include "decompose_internal.hpp"
#include "qtrank/quadratic.hpp"
#include "qtrank/spectral.hpp"

namespace qtrank {
namespace detail {

namespace {

// X -> M X M^{-1} on every frontal slice.
void similarity(Work& w, const HMatrix& m) {
    w.left(m);
    w.right(h_inverse(m));
}

Eigen::MatrixXd slice_mix(double f11, double f12, double f21, double f22) {
    Eigen::MatrixXd f = Eigen::MatrixXd::Identity(3, 3);
    f(1, 1) = f11;
    f(1, 2) = f12;
    f(2, 1) = f21;
    f(2, 2) = f22;
    return f;
}

// One slice is (numerically) singular: reduce it to e0 e0^T and read off three terms.
Decomposition singular_branch(const Tensor3& t, int s, Ctx& ctx) {
    Work w(t, ctx);
    if (s != 0) w.real(real_swap(3, 0, s));
    const double z = ctx.zero(w.t);
    const HMatrix a = w.t.frontal(0);
    const double an = a.max_norm();
    if (an <= z) {
        const Tensor3 sub = sub_tensor(w.t, {0, 1}, {1, 2}, {0, 1});
        Decomposition d = embed(core_222(sub, ctx), w.t.dims(), {0, 1}, {1, 2}, {0, 1});
        ctx.path = DecomposePath::P232ToP222;
        return w.finish(d);
    }

    const auto pq = rank_factorization(a, z / an);
    const HVector& p = pq.front().first;
    const HVector& q = pq.front().second;
    const int po = p[0].norm() >= p[1].norm() ? 1 : 0;
    const int qo = q[0].norm() >= q[1].norm() ? 1 : 0;
    HMatrix lp(2, 2), rq(2, 2);
    for (int r = 0; r < 2; ++r) {
        lp(r, 0) = p[r];
        lp(r, 1) = r == po ? 1.0 : 0.0;
        rq(0, r) = q[r];
        rq(1, r) = r == qo ? 1.0 : 0.0;
    }
    w.left(h_inverse(lp));
    w.right(h_inverse(rq));

    Decomposition d;
    d.dims = w.t.dims();
    const double z2 = ctx.zero(w.t);
    if (std::max(w.t(1, 1, 1).norm(), w.t(1, 2, 1).norm()) <= z2) {
        d.terms.push_back(fiber_term(w.t, 0, 0));
        d.terms.push_back(fiber_term(w.t, 0, 1));
        d.terms.push_back(fiber_term(w.t, 1, 0));
        ctx.path = DecomposePath::P232SingularFiber;
        return w.finish(d);
    }
    const PairMix mix = best_pair_mix(w.t(1, 1, 1), w.t(1, 2, 1));
    if (mix.c != 0.0 || mix.d != 0.0) w.real(slice_mix(1.0, mix.c, mix.d, 1.0));

    const Tensor3& s3 = w.t;
    Quaternion rem[3] = {s3(0, 0, 0), 0.0, 0.0};
    for (int j = 1; j < 3; ++j) {
        const Quaternion x11 = s3(0, j, 0), x12 = s3(0, j, 1), x21 = s3(1, j, 0), x22 = s3(1, j, 1);
        const Quaternion r = x12 * q_inv(x22);
        d.terms.push_back({{r, 1.0}, unit_vector(3, j), {x21, x22}});
        rem[j] = x11 - r * x21;
    }
    d.terms.push_back({{1.0, 0.0}, {rem[0], rem[1], rem[2]}, {1.0, 0.0}});
    ctx.path = DecomposePath::P232Singular;
    return w.finish(d);
}

// Slices (I; B; C) where slice `which` is diagonalised by P.
Decomposition diagonal_terms(const Tensor3& t, int which, const HMatrix& p, Ctx& ctx) {
    Work w(t, ctx);
    if (which == 2) w.real(real_swap(3, 1, 2));
    w.left(h_inverse(p));
    w.right(p);
    // slice 1 is now diagonal; slice 2 is general
    const Tensor3& s = w.t;
    const Quaternion c12 = s(0, 2, 1), c21 = s(1, 2, 0);
    Decomposition d;
    d.dims = s.dims();
    d.terms.push_back({{1.0, c21}, unit_vector(3, 2), {1.0, c12}});
    d.terms.push_back({{1.0, 0.0}, {s(0, 0, 0), s(0, 1, 0), s(0, 2, 0) - 1.0}, {1.0, 0.0}});
    d.terms.push_back({{0.0, 1.0}, {s(1, 0, 1), s(1, 1, 1), s(1, 2, 1) - c21 * c12}, {0.0, 1.0}});
    ctx.path = DecomposePath::P232Diagonalizable;
    return w.finish(d);
}

// Slices (I; B; C): terms when B or C diagonalises.
std::optional<Decomposition> diagonal_branch(const Tensor3& t, Ctx& ctx, bool only_third = false) {
    std::optional<Diagonalization> best;
    int which = 0;
    for (int j = only_third ? 2 : 1; j < 3; ++j) {
        auto dg = diagonalize(t.frontal(j), ctx.tol);
        if (dg && (!best || dg->condition < best->condition)) best = std::move(dg), which = j;
    }
    if (!best) return std::nullopt;
    return diagonal_terms(t, which, best->p, ctx);
}

// Neither B nor C diagonalises. Triangularise B, normalise it to [[i,0],[1,i]],
// bring C to a conjugate of the Jordan block [[i,1],[0,i]], and combine the two
// into a diagonalisable slice.
Decomposition schur_branch(const Tensor3& t, Ctx& ctx) {
    Work w(t, ctx);
    const HMatrix jswap = swap_matrix(2, 0, 1);

    const SchurForm sb = schur_triangularize(w.t.frontal(1));
    w.left(sb.u.adjoint());
    w.right(sb.u);
    similarity(w, jswap);   // B lower triangular
    {
        const Quaternion b11 = w.t(0, 1, 0), b22 = w.t(1, 1, 1);
        // A defective eigenvalue splits by O(sqrt of the input error). The terms are
        // read from the working entries at the end, so the classes only need to
        // agree well enough for the combined slice to diagonalize.
        const double bscale = std::max(w.t.frontal(1).max_norm(), 1.0);
        const double gap = ctx.tol.cluster * bscale;
        if (!similar(b11, b22, 1e-4 * bscale))
            throw Error(ErrorKind::AlgorithmFailure, "2x3x2: non-diagonalizable slice with dissimilar diagonal");
        const double re = 0.5 * (b11.w + b22.w);
        const double im = 0.5 * (b11.x + b22.x);
        Eigen::MatrixXd sh = Eigen::MatrixXd::Identity(3, 3);
        sh(1, 0) = -re;
        w.real(sh);
        if (std::abs(im) <= gap) return w.finish(singular_branch(w.t, 1, ctx));
        w.real(slice_mix(1.0 / im, 0.0, 0.0, 1.0));
    }
    {
        const Quaternion q = w.t(1, 1, 0);
        const Quaternion h = 0.5 * (q.z * Quaternion::j() - q.y * Quaternion::k());
        similarity(w, {{1.0, 0.0}, {h, 1.0}});
        const Quaternion zc = w.t(1, 1, 0);
        if (zc.norm() <= ctx.zero(w.t))
            throw Error(ErrorKind::AlgorithmFailure, "2x3x2: triangular slice unexpectedly diagonal");
        const Quaternion zc_c{zc.w, zc.x, 0.0, 0.0};
        similarity(w, {{1.0, 0.0}, {0.0, q_inv(zc_c)}});
    }

    // C: shift and scale so its eigenvalue class is i
    {
        const EigenReport er = complex_eigen(chi_adjoint(w.t.frontal(2)), ctx.tol);
        // eigenvalues come sorted by real part; take the two with Im >= 0 by sorting on imag
        std::vector<Complex> ev = er.eigenvalues;
        std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) { return a.imag() > b.imag(); });
        const Complex mu = 0.5 * (ev[0] + ev[1]);
        Eigen::MatrixXd sh = Eigen::MatrixXd::Identity(3, 3);
        sh(2, 0) = -mu.real();
        w.real(sh);
        if (std::abs(mu.imag()) <= ctx.tol.cluster * std::max(w.t.frontal(2).max_norm(), 1.0))
            return w.finish(singular_branch(w.t, 2, ctx));
        w.real(slice_mix(1.0, 0.0, 0.0, 1.0 / mu.imag()));
    }
    // Jordan chain C p1 = p1 i, C p2 = p1 + p2 i through the complex adjoint
    HMatrix pj(2, 2);
    {
        const CMatrix k = chi_adjoint(w.t.frontal(2)) - Complex(0.0, 1.0) * CMatrix::Identity(4, 4);
        Eigen::JacobiSVD<CMatrix> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const CVector z1 = svd.matrixV().col(3);
        // minimum-norm solution on the rank-3 part
        CVector z2 = CVector::Zero(4);
        const CVector uz = svd.matrixU().adjoint() * z1;
        for (int r = 0; r < 3; ++r) z2 += svd.matrixV().col(r) * (uz(r) / svd.singularValues()(r));
        const HVector p1 = to_quaternion_vector(z1), p2 = to_quaternion_vector(z2);
        pj = {{p1[0], p2[0]}, {p1[1], p2[1]}};
        if (inverse_condition(pj) <= ctx.tol.branch)
            throw Error(ErrorKind::AlgorithmFailure, "2x3x2: degenerate Jordan chain");
    }
    const Quaternion pa = pj(0, 0), pc = pj(1, 0);
    if (pa.norm() <= ctx.tol.branch * pj.max_norm()) {
        // both slices become upper triangular
        similarity(w, jswap);
        Decomposition d;
        d.dims = w.t.dims();
        d.terms.push_back(fiber_term(w.t, 0, 0));
        d.terms.push_back(fiber_term(w.t, 0, 1));
        d.terms.push_back(fiber_term(w.t, 1, 1));
        ctx.path = DecomposePath::P232SchurTriangular;
        return w.finish(d);
    }
    similarity(w, {{1.0, 0.0}, {-(pc * q_inv(pa)), 1.0}});
    {
        const Quaternion c1 = w.t(1, 1, 0);
        if (c1.norm() <= ctx.zero(w.t))
            throw Error(ErrorKind::AlgorithmFailure, "2x3x2: vanishing subdiagonal");
        similarity(w, {{1.0, 0.0}, {0.0, q_inv(c1)}});
    }

    // slice 2 <- slice 1 + t slice 2 with distinct diagonal classes
    static constexpr double ts[] = {1.0, -1.0, 0.5, 2.0, -0.5, -2.0, 0.25, 4.0, -0.25, -4.0, 3.0, -3.0};
    double tpick = 0.0;
    for (double tv : ts) {
        const Quaternion alpha = -(w.t(0, 1, 0) + tv * w.t(0, 2, 0));
        const Quaternion beta = w.t(1, 1, 1) + tv * w.t(1, 2, 1);
        if ((alpha - beta).norm() >= 1e-6) {
            tpick = tv;
            break;
        }
    }
    if (tpick == 0.0) throw Error(ErrorKind::AlgorithmFailure, "2x3x2: no admissible slice combination");
    w.real(slice_mix(1.0, 0.0, 1.0, tpick));
    try {
        const Quaternion alpha = -w.t(0, 2, 0), beta = w.t(1, 2, 1), gamma = w.t(0, 2, 1);
        QuadraticOptions qo;
        qo.seed = ctx.seed;
        const QuadraticRoot root = solve_quadratic(alpha, beta, gamma, qo);
        similarity(w, {{1.0, -root.x}, {0.0, 1.0}});
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::SolveBudgetExceeded) throw;
        // the combined slice is diagonalisable regardless; the root only exhibits it
    }
    auto d = diagonal_branch(w.t, ctx, true);
    if (!d) throw Error(ErrorKind::AlgorithmFailure, "2x3x2: combined slice did not diagonalize");
    ctx.path = DecomposePath::P232Schur;
    return w.finish(*d);
}

}  // namespace

Decomposition core_232(const Tensor3& t, Ctx& ctx) {
    const double z = ctx.zero(t);
    int worst = 0;
    double smin = 0.0;
    for (int j = 0; j < 3; ++j) {
        const double s = sigma_min(t.frontal(j));
        if (j == 0 || s < smin) smin = s, worst = j;
    }
    if (smin <= z) return singular_branch(t, worst, ctx);

    // base slice: the best-conditioned of a few real combinations, since three
    // nearly rank-one slices can still have a well-conditioned sum
    static constexpr double combos[][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, -1, 0},
                                           {1, 0, 1}, {1, 0, -1}, {0, 1, 1}, {0, 1, -1}, {1, 1, 1}};
    int best = 0;
    double cbest = -1.0;
    for (int c = 0; c < 10; ++c) {
        HMatrix x(2, 2);
        for (int j = 0; j < 3; ++j)
            if (combos[c][j] != 0.0) x += combos[c][j] * t.frontal(j);
        const double ic = inverse_condition(x);
        if (ic > cbest * 1.5) cbest = ic, best = c;   // prefer plain slices unless clearly worse
    }
    Work w(t, ctx);
    {
        // row 0 takes the combination; the other rows keep the remaining unit slices
        int lead = 0;
        for (int j = 1; j < 3; ++j)
            if (std::abs(combos[best][j]) > std::abs(combos[best][lead])) lead = j;
        Eigen::MatrixXd f = Eigen::MatrixXd::Zero(3, 3);
        for (int j = 0; j < 3; ++j) f(0, j) = combos[best][j];
        int row = 1;
        for (int j = 0; j < 3; ++j)
            if (j != lead) f(row++, j) = 1.0;
        if (!f.isIdentity()) w.real(f);
    }
    w.right(h_inverse(w.t.frontal(0)));
    if (auto d = diagonal_branch(w.t, ctx)) return w.finish(*d);
    return w.finish(schur_branch(w.t, ctx));
}

}  // namespace detail

Complex232Scalars complex_232_scalars(const Tensor3& t) {
    if (t.dims() != Dims{2, 3, 2})
        throw Error(ErrorKind::DimensionMismatch, "complex 2x3x2 formula needs a 2x3x2 tensor");
    Complex x[3][5];
    for (int j = 0; j < 3; ++j) {
        x[j][1] = {t(0, j, 0).w, t(0, j, 0).x};
        x[j][2] = {t(0, j, 1).w, t(0, j, 1).x};
        x[j][3] = {t(1, j, 0).w, t(1, j, 0).x};
        x[j][4] = {t(1, j, 1).w, t(1, j, 1).x};
    }
    // determinant of the 3x3 matrix with columns (X_p, X_q, X_r), X = A, B, C
    auto det = [&](int p, int q, int r) {
        const Complex(&a)[5] = x[0];
        const Complex(&b)[5] = x[1];
        const Complex(&c)[5] = x[2];
        return a[p] * b[q] * c[r] - a[p] * b[r] * c[q] - a[q] * b[p] * c[r] + a[q] * b[r] * c[p] +
               a[r] * b[p] * c[q] - a[r] * b[q] * c[p];
    };
    return {det(2, 3, 4), det(1, 2, 4), det(1, 3, 4), det(1, 2, 3)};
}

namespace detail {

Decomposition core_232_complex(const Tensor3& t, const Ctx& ctx) {
    if (t.dims() != Dims{2, 3, 2})
        throw Error(ErrorKind::PreconditionViolated, "complex 2x3x2 formula needs a 2x3x2 tensor");
    if (!t.is_complex(ctx.tol.branch * (1.0 + t.max_norm())))
        throw Error(ErrorKind::PreconditionViolated, "complex 2x3x2 formula needs complex entries");
    const Complex232Scalars s = complex_232_scalars(t);
    double scale = 1.0;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) scale = std::max(scale, t(i, j, k).norm());
    const double dz = ctx.tol.branch * scale * scale * scale;
    if (std::abs(s.sigma1) <= dz || std::abs(s.sigma2) <= dz)
        throw Error(ErrorKind::PreconditionViolated, "complex 2x3x2 formula needs det M and det N nonzero");

    auto cx = [&](int i, int j, int k) { return Complex(t(i, j, k).w, t(i, j, k).x); };
    auto q = [](Complex c) { return Quaternion::from_complex(c); };
    Decomposition d;
    d.dims = t.dims();
    HVector b1(3), b2(3), b3(3);
    for (int j = 0; j < 3; ++j) {
        b1[j] = q(cx(0, j, 1));
        b2[j] = q(cx(1, j, 1));
        b3[j] = q(cx(0, j, 0) * s.sigma1 - cx(0, j, 1) * s.tau1);
    }
    d.terms.push_back({{1.0, 0.0}, b1, {q(s.tau1 / s.sigma1), 1.0}});
    d.terms.push_back({{0.0, 1.0}, b2, {q(s.tau2 / s.sigma2), 1.0}});
    d.terms.push_back({{q(1.0 / s.sigma1), q(-1.0 / s.sigma2)}, b3, {1.0, 0.0}});
    return d;
}

}  // namespace detail
}  // namespace qtrank
