#include <algorithm>
#include <numeric>
#include <random>

#include "decompose_internal.hpp"

namespace qtrank {

const char* to_string(DecomposePath p) {
    switch (p) {
        case DecomposePath::Zero: return "zero";
        case DecomposePath::MatrixRoute: return "matrix";
        case DecomposePath::P222Prop: return "222.prop";
        case DecomposePath::P223Split: return "223.split";
        case DecomposePath::P223ToP222: return "223.to222";
        case DecomposePath::P223ColumnC3: return "223.c3";
        case DecomposePath::P223ColumnC4: return "223.c4";
        case DecomposePath::P232ToP222: return "232.to222";
        case DecomposePath::P232Singular: return "232.singular";
        case DecomposePath::P232SingularFiber: return "232.singular.fiber";
        case DecomposePath::P232Diagonalizable: return "232.diagonalizable";
        case DecomposePath::P232Schur: return "232.schur";
        case DecomposePath::P232SchurTriangular: return "232.schur.triangular";
        case DecomposePath::P232Complex: return "232.complex";
        case DecomposePath::P233Split: return "233.split";
        case DecomposePath::P233ToP232: return "233.to232";
        case DecomposePath::P233FrontalSplit: return "233.frontal";
        case DecomposePath::P233Fiber: return "233.fiber";
        case DecomposePath::P233Main: return "233.main";
        case DecomposePath::P323SingularFrontal: return "323.singular";
        case DecomposePath::P323DeficientHorizontal: return "323.horizontal";
        case DecomposePath::P323DeficientLateral: return "323.lateral";
        case DecomposePath::P323Normal: return "323.normal";
        case DecomposePath::P333Split: return "333.split";
        case DecomposePath::P333Reduce: return "333.reduce";
        case DecomposePath::P333Complex: return "333.complex";
    }
    return "unknown";
}

int shape_bound(const Dims& d) {
    for (int n : d)
        if (n < 0 || n > 3) throw Error(ErrorKind::UnsupportedShape, "dimensions must lie in 0..3, got " + dims_string(d));
    if (d[0] == 0 || d[1] == 0 || d[2] == 0) return 0;
    if (d[0] == 1) return std::min(d[1], d[2]);
    if (d[1] == 1) return std::min(d[0], d[2]);
    if (d[2] == 1) return std::min(d[0], d[1]);
    const int threes = int(std::count(d.begin(), d.end(), 3));
    if (threes <= 1) return 3;
    if (threes == 2) return 4;
    return 6;
}

namespace detail {

HMatrix permutation(int n, std::initializer_list<int> to_from) {
    HMatrix p(n, n);
    int r = 0;
    for (int src : to_from) p(r++, src) = 1.0;
    return p;
}

HMatrix swap_matrix(int n, int a, int b) {
    HMatrix p = HMatrix::identity(n);
    if (a == b) return p;
    p(a, a) = 0.0;
    p(b, b) = 0.0;
    p(a, b) = 1.0;
    p(b, a) = 1.0;
    return p;
}

Eigen::MatrixXd real_swap(int n, int a, int b) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
    p.row(a).swap(p.row(b));
    return p;
}

std::vector<int> iota(int n) {
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

std::vector<int> iota_except(int n, int skip) {
    std::vector<int> v;
    for (int i = 0; i < n; ++i)
        if (i != skip) v.push_back(i);
    return v;
}

Tensor3 sub_tensor(const Tensor3& t, const std::vector<int>& is, const std::vector<int>& js,
                   const std::vector<int>& ks) {
    Tensor3 s(int(is.size()), int(js.size()), int(ks.size()));
    for (std::size_t a = 0; a < is.size(); ++a)
        for (std::size_t b = 0; b < js.size(); ++b)
            for (std::size_t c = 0; c < ks.size(); ++c) s(int(a), int(b), int(c)) = t(is[a], js[b], ks[c]);
    return s;
}

Decomposition embed(const Decomposition& d, const Dims& full, const std::vector<int>& is,
                    const std::vector<int>& js, const std::vector<int>& ks) {
    Decomposition out;
    out.dims = full;
    auto pad = [](const HVector& v, int n, const std::vector<int>& idx) {
        HVector w(n);
        for (std::size_t m = 0; m < idx.size(); ++m) w[idx[m]] = v[m];
        return w;
    };
    for (const auto& s : d.terms)
        out.terms.push_back({pad(s.a, full[0], is), pad(s.b, full[1], js), pad(s.c, full[2], ks)});
    return out;
}

Decomposition slice_terms(const HMatrix& m, int mode_axis, int slot, const Dims& dims, double abs_tol,
                          int max_terms) {
    const double mn = m.max_norm();
    Decomposition d;
    d.dims = dims;
    if (mn <= abs_tol || mn == 0.0) return d;
    d = matrix_rank_decomp(m, mode_axis, slot, dims, abs_tol / mn);
    if (max_terms >= 0 && int(d.terms.size()) > max_terms) d.terms.resize(max_terms);
    return d;
}

int slice_rank(const HMatrix& m, double abs_tol) {
    const double mn = m.max_norm();
    if (mn <= abs_tol || mn == 0.0) return 0;
    return int(rank_factorization(m, abs_tol / mn).size());
}

SimpleTensor fiber_term(const Tensor3& t, int i, int k) {
    SimpleTensor s{unit_vector(t.n1(), i), HVector(t.n2()), unit_vector(t.n3(), k)};
    for (int j = 0; j < t.n2(); ++j) s.b[j] = t(i, j, k);
    return s;
}

void add_nonzero_fibers(Decomposition& d, const Tensor3& t, double abs_tol) {
    for (int i = 0; i < t.n1(); ++i)
        for (int k = 0; k < t.n3(); ++k) {
            double m = 0.0;
            for (int j = 0; j < t.n2(); ++j) m = std::max(m, t(i, j, k).norm());
            if (m > abs_tol) d.terms.push_back(fiber_term(t, i, k));
        }
}

PairMix best_pair_mix(const Quaternion& x, const Quaternion& y) {
    static constexpr double coefs[] = {0.0, 1.0, -1.0, 2.0, -2.0, 0.5, -0.5};
    PairMix best{0.0, 0.0, -1.0};
    for (double c : coefs)
        for (double d : coefs) {
            if (std::abs(1.0 - c * d) < 0.5) continue;
            const double score = std::min((x + c * y).norm(), (d * x + y).norm());
            if (score > best.score * (1.0 + 1e-12)) best = {c, d, score};
        }
    return best;
}

Decomposition core_matrix(const Tensor3& t, Ctx& ctx) {
    ctx.path = DecomposePath::MatrixRoute;
    const double z = ctx.zero(t);
    if (t.n2() == 1) return slice_terms(t.frontal(0), 2, 0, t.dims(), z);
    if (t.n1() == 1) return slice_terms(t.horizontal(0), 1, 0, t.dims(), z);
    return slice_terms(t.lateral(0), 3, 0, t.dims(), z);
}

Decomposition core_any(const Tensor3& t, Ctx& ctx) {
    const Dims& d = t.dims();
    Decomposition empty;
    empty.dims = d;
    if (d[0] == 0 || d[1] == 0 || d[2] == 0 || t.max_norm() <= ctx.floor) {
        ctx.path = DecomposePath::Zero;
        return empty;
    }
    if (d[0] == 1 || d[1] == 1 || d[2] == 1) return core_matrix(t, ctx);
    const Dims s222{2, 2, 2}, s223{2, 2, 3}, s322{3, 2, 2}, s232{2, 3, 2}, s233{2, 3, 3}, s332{3, 3, 2},
        s323{3, 2, 3}, s333{3, 3, 3};
    if (d == s222) return core_222(t, ctx);
    if (d == s223) return core_223(t, ctx);
    if (d == s322) return core_322(t, ctx);
    if (d == s232) return core_232(t, ctx);
    if (d == s233) return core_233(t, ctx);
    if (d == s332) return core_332(t, ctx);
    if (d == s323) return core_323(t, ctx);
    if (d == s333) return core_333(t, ctx);
    throw Error(ErrorKind::UnsupportedShape, "no algorithm for shape " + dims_string(d));
}

}  // namespace detail
}  // namespace qtrank
