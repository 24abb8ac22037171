#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "qtrank/decompose.hpp"
#include "qtrank/error.hpp"
#include "qtrank/oracle.hpp"
#include "qtrank/seed.hpp"
#include "qtrank/spectral.hpp"
#include "test_util.hpp"

using namespace qtrank;
using qtest::mat2;

namespace {

const Quaternion I = Quaternion::i(), J = Quaternion::j(), K = Quaternion::k();

double res(const Tensor3& t, const DecomposeOutcome& o) { return relative_error(t, densify(o.decomposition)); }

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::Parse;
}

struct Batch {
    int max_terms = 0;
    double max_residual = 0.0;
    int failures = 0;
};

Batch batch(const Dims& d, int n, std::uint64_t master, Distribution dist = Distribution::Uniform) {
    Batch b;
    for (int c = 0; c < n; ++c) {
        const Tensor3 t = random_tensor(d, derive_seed(master, c), dist);
        try {
            const DecomposeOutcome o = dispatch(t);
            b.max_terms = std::max(b.max_terms, int(o.decomposition.size()));
            b.max_residual = std::max(b.max_residual, res(t, o));
        } catch (const Error&) {
            ++b.failures;
        }
    }
    return b;
}

// Small-integer, sparse and low-rank inputs that land on the degenerate branches.
Tensor3 structured(const Dims& d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> kind(0, 5), small(-1, 1), coin(0, 3);
    const int mode = int(rng() % 3);
    auto entry = [&]() -> Quaternion {
        switch (mode) {
            case 0: return {double(small(rng)), 0, 0, 0};
            case 1: return {double(small(rng)), double(small(rng)), 0, 0};
            default: return {double(small(rng)), double(small(rng)), double(small(rng)), double(small(rng))};
        }
    };
    Tensor3 t(d);
    const int k = kind(rng);
    if (k <= 2) {
        for (int i = 0; i < d[0]; ++i)
            for (int j = 0; j < d[1]; ++j)
                for (int l = 0; l < d[2]; ++l) t(i, j, l) = (k == 0 || coin(rng)) ? entry() : Quaternion{};
        return t;
    }
    const int r = 1 + int(rng() % 5);
    for (int l = 0; l < r; ++l) {
        SimpleTensor s{HVector(d[0]), HVector(d[1]), HVector(d[2])};
        for (auto& q : s.a) q = coin(rng) ? entry() : Quaternion{};
        for (auto& q : s.b) q = coin(rng) ? entry() : Quaternion{};
        for (auto& q : s.c) q = coin(rng) ? entry() : Quaternion{};
        t += densify(s);
    }
    return t;
}

// (A; A S J1 S^{-1}; A S' J2 S'^{-1}) with 2x2 Jordan blocks J1, J2.
Tensor3 jordan_232(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    auto rq = [&] { return Quaternion{g(rng), g(rng), g(rng), g(rng)}; };
    auto rm = [&] { return mat2(rq(), rq(), rq(), rq()); };
    const int mode = int(rng() % 4);
    auto jordan = [&] {
        Quaternion lam = mode == 1 ? Quaternion{0.3, 1.1, 0, 0} : Quaternion{g(rng), g(rng), 0, 0};
        if (mode == 3) lam = Quaternion{g(rng), 0, 0, 0};
        const HMatrix s = rm();
        return s * mat2(lam, 1, 0, lam) * h_inverse(s);
    };
    const HMatrix a = mode == 0 ? HMatrix::identity(2) : rm();
    return Tensor3::from_frontal({a, a * jordan(), a * jordan()});
}

Tensor3 pattern_333(const Complex& a11, const Complex& a22, const Complex& b11, const Complex& b22,
                    const Complex& c11, const Complex& c12, const Complex& c21, const Complex& c22) {
    auto q = [](Complex c) { return Quaternion::from_complex(c); };
    Tensor3 t(3, 3, 3);
    t(0, 0, 2) = 1.0;
    t(2, 0, 0) = 1.0;
    t(1, 1, 2) = 1.0;
    t(2, 1, 1) = 1.0;
    t(0, 0, 0) = q(a11);
    t(1, 0, 1) = q(a22);
    t(0, 1, 0) = q(b11);
    t(1, 1, 1) = q(b22);
    t(0, 2, 0) = q(c11);
    t(0, 2, 1) = q(c12);
    t(1, 2, 0) = q(c21);
    t(1, 2, 1) = q(c22);
    return t;
}

// Characteristic polynomial coefficients of a complex matrix, highest degree first
// (Faddeev-LeVerrier).
std::vector<Complex> char_poly(const CMatrix& a) {
    const int n = int(a.rows());
    std::vector<Complex> c(n + 1);
    c[0] = 1.0;
    CMatrix m = CMatrix::Zero(n, n);
    for (int k = 1; k <= n; ++k) {
        m = a * m + c[k - 1] * CMatrix::Identity(n, n);
        c[k] = -(a * m).trace() / double(k);
    }
    return c;
}

HMatrix normal_form_m(const Quaternion& w, double u, double v) {
    return HMatrix{{0, 0, w}, {Quaternion(u, v, 0, 0), 0, 0}, {0, 1, 0}};
}

}  // namespace

TEST_CASE("shape bounds") {
    CHECK(shape_bound({2, 2, 2}) == 3);
    CHECK(shape_bound({2, 2, 3}) == 3);
    CHECK(shape_bound({3, 2, 2}) == 3);
    CHECK(shape_bound({2, 3, 2}) == 3);
    CHECK(shape_bound({2, 3, 3}) == 4);
    CHECK(shape_bound({3, 3, 2}) == 4);
    CHECK(shape_bound({3, 2, 3}) == 4);
    CHECK(shape_bound({3, 3, 3}) == 6);
    CHECK(shape_bound({1, 3, 3}) == 3);
    CHECK(shape_bound({3, 1, 2}) == 2);
    CHECK(shape_bound({2, 2, 1}) == 2);
    CHECK(kind_of([] { shape_bound({4, 2, 2}); }) == ErrorKind::UnsupportedShape);
    CHECK(kind_of([] { dispatch(Tensor3(2, 4, 2)); }) == ErrorKind::UnsupportedShape);
}

TEST_CASE("2x2x2") {
    const DecomposeOutcome z = decompose_222(Tensor3(2, 2, 2));
    CHECK(z.decomposition.size() == 0);
    CHECK(z.path == DecomposePath::Zero);

    const Tensor3 w = qtest::witness_222();
    const DecomposeOutcome o = decompose_222(w);
    CHECK(o.decomposition.size() == 3);
    CHECK(res(w, o) <= 1e-12);
    CHECK(o.bound == 3);
    CHECK(rank_certificate_square(w).verdict == CertVerdict::MoreThanN);

    const Batch b = batch({2, 2, 2}, 10000, 201);
    CHECK(b.failures == 0);
    CHECK(b.max_terms <= 3);
    CHECK(b.max_residual <= 1e-8);
}

TEST_CASE("2x2x3 and 3x2x2") {
    Tensor3 t(2, 2, 3);
    t.set_frontal(0, HMatrix::from_column(HVector{1, I}) * HMatrix::from_row(HVector{J, 2, K}));
    DecomposeOutcome o = decompose_223(t);
    CHECK(o.decomposition.size() <= 1);
    CHECK(res(t, o) <= 1e-12);

    const Tensor3 ex = qtest::example_223();
    o = decompose_223(ex);
    CHECK(o.decomposition.size() <= 3);
    CHECK(res(ex, o) <= 1e-9);
    CHECK(o.oplog_replayed);

    const Tensor3 ext = conjugate_transpose(ex);
    o = decompose_223(ext);
    CHECK(o.decomposition.size() <= 3);
    CHECK(res(ext, o) <= 1e-9);

    for (const Dims& d : {Dims{2, 2, 3}, Dims{3, 2, 2}}) {
        const Batch b = batch(d, 10000, 202);
        CHECK(b.failures == 0);
        CHECK(b.max_terms <= 3);
        CHECK(b.max_residual <= 1e-8);
    }
    CHECK_THROWS_AS(decompose_223(Tensor3(2, 3, 2)), Error);
}

TEST_CASE("2x3x2 diagonal slices") {
    const Quaternion dij[2] = {I, J}, d12[2] = {1, 2};
    const Tensor3 t = Tensor3::from_frontal(
        {HMatrix::identity(2), HMatrix::diagonal(dij), HMatrix::diagonal(d12)});
    const DecomposeOutcome o = decompose_232(t);
    CHECK(o.decomposition.size() >= 2);
    CHECK(o.decomposition.size() <= 3);
    CHECK(res(t, o) <= 1e-10);
    CHECK(o.path == DecomposePath::P232Diagonalizable);
}

TEST_CASE("2x3x2 singular first slice") {
    qtest::Rng rng(203);
    double worst = 0;
    for (int n = 0; n < 200; ++n) {
        const HMatrix a = HMatrix::from_column(rng.vec(2)) * HMatrix::from_row(rng.vec(2));
        const Tensor3 t = Tensor3::from_frontal({a, rng.matrix(2, 2), rng.matrix(2, 2)});
        const DecomposeOutcome o = decompose_232(t);
        CHECK(o.decomposition.size() <= 3);
        CHECK(o.path == DecomposePath::P232Singular);
        worst = std::max(worst, res(t, o));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("2x3x2 non-diagonalizable slices") {
    const Tensor3 t = Tensor3::from_frontal({HMatrix::identity(2), mat2(I, 0, 1, I), mat2(I, 1, 0, I)});
    CHECK_FALSE(is_diagonalizable(t.frontal(1)).diagonalizable);
    CHECK_FALSE(is_diagonalizable(t.frontal(2)).diagonalizable);
    const DecomposeOutcome o = decompose_232(t);
    CHECK(o.decomposition.size() == 3);
    CHECK(res(t, o) <= 1e-8);
    CHECK(o.path == DecomposePath::P232Schur);

    const Tensor3 tri = Tensor3::from_frontal({HMatrix::identity(2), mat2(I, 1, 0, I), mat2(J, 1, 0, J)});
    const DecomposeOutcome ot = decompose_232(tri);
    CHECK(ot.decomposition.size() == 3);
    CHECK(res(tri, ot) <= 1e-12);
    CHECK(ot.path == DecomposePath::P232SchurTriangular);

    int failures = 0;
    double worst = 0;
    for (int n = 0; n < 500; ++n) {
        const Tensor3 j = jordan_232(derive_seed(204, n));
        try {
            const DecomposeOutcome oj = dispatch(j);
            CHECK(oj.decomposition.size() <= 3);
            worst = std::max(worst, res(j, oj));
        } catch (const Error&) {
            ++failures;
        }
    }
    CHECK(failures == 0);
    CHECK(worst <= 1e-7);
}

TEST_CASE("2x3x2 random") {
    const Batch b = batch({2, 3, 2}, 3000, 205);
    CHECK(b.failures == 0);
    CHECK(b.max_terms <= 3);
    CHECK(b.max_residual <= 1e-8);
}

TEST_CASE("2x3x2 complex formula") {
    // det M = 0 here, so the formula does not apply
    const Tensor3 singular_m = Tensor3::from_frontal({HMatrix::identity(2), mat2(0, 1, 1, 0), mat2(1, 1, 1, 2)});
    const Complex232Scalars sm = complex_232_scalars(singular_m);
    CHECK(std::abs(sm.sigma1) <= 1e-15);
    CHECK(std::abs(sm.sigma2 - 1.0) <= 1e-15);
    CHECK(kind_of([&] { decompose_232_complex(singular_m); }) == ErrorKind::PreconditionViolated);

    const Tensor3 t = Tensor3::from_frontal({HMatrix::identity(2), mat2(0, 1, 1, 0), mat2(1, 1, 2, 2)});
    const DecomposeOutcome o = decompose_232_complex(t);
    CHECK(o.decomposition.size() == 3);
    CHECK(res(t, o) <= 1e-12);
    CHECK(o.path == DecomposePath::P232Complex);

    CHECK(kind_of([&] { decompose_232_complex(qtest::example_223()); }) == ErrorKind::PreconditionViolated);
    Tensor3 quat = t;
    quat(0, 0, 0) = J;
    CHECK(kind_of([&] { decompose_232_complex(quat); }) == ErrorKind::PreconditionViolated);
}

TEST_CASE("2x3x2 complex identities") {
    qtest::Rng rng(206);
    double ident = 0, dets = 0, worst = 0;
    for (int n = 0; n < 200; ++n) {
        const Tensor3 t = rng.complex_tensor({2, 3, 2});
        const Complex232Scalars s = complex_232_scalars(t);
        Complex x[3][4];
        for (int j = 0; j < 3; ++j) {
            x[j][0] = {t(0, j, 0).w, t(0, j, 0).x};
            x[j][1] = {t(0, j, 1).w, t(0, j, 1).x};
            x[j][2] = {t(1, j, 0).w, t(1, j, 0).x};
            x[j][3] = {t(1, j, 1).w, t(1, j, 1).x};
        }
        for (int j = 0; j < 3; ++j)
            ident = std::max(ident, std::abs(x[j][1] * s.tau1 - x[j][0] * s.sigma1 + x[j][3] * s.tau2 -
                                              x[j][2] * s.sigma2));
        Eigen::Matrix3cd m, nn;
        for (int j = 0; j < 3; ++j) {
            m.row(j) << x[j][1], x[j][2], x[j][3];
            nn.row(j) << x[j][0], x[j][1], x[j][3];
        }
        dets = std::max({dets, std::abs(m.determinant() - s.sigma1), std::abs(nn.determinant() - s.sigma2)});
        const DecomposeOutcome o = decompose_232_complex(t);
        CHECK(o.decomposition.size() == 3);
        worst = std::max(worst, res(t, o));
    }
    CHECK(ident <= 1e-12);
    CHECK(dets <= 1e-12);
    CHECK(worst <= 1e-10);
}

TEST_CASE("2x3x3 and 3x3x2") {
    Tensor3 t(2, 3, 3);
    qtest::Rng rng(207);
    t.set_horizontal(0, HMatrix::from_column(rng.vec(3)) * HMatrix::from_row(rng.vec(3)));
    t.set_horizontal(1, HMatrix::from_column(rng.vec(3)) * HMatrix::from_row(rng.vec(3)));
    DecomposeOutcome o = decompose_233(t);
    CHECK(o.decomposition.size() <= 2);
    CHECK(o.path == DecomposePath::P233Split);
    CHECK(res(t, o) <= 1e-12);

    HMatrix b(3, 3);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) b(r, c) = rng.complex();
    t.set_horizontal(0, HMatrix::identity(3));
    t.set_horizontal(1, b);
    o = decompose_233(t);
    CHECK(o.decomposition.size() <= 4);
    CHECK(res(t, o) <= 1e-8);

    for (const Dims& d : {Dims{2, 3, 3}, Dims{3, 3, 2}}) {
        const Batch bt = batch(d, 1000, 208);
        CHECK(bt.failures == 0);
        CHECK(bt.max_terms <= 4);
        CHECK(bt.max_residual <= 1e-7);
    }
    const Tensor3 t332 = random_tensor({3, 3, 2}, 5);
    o = dispatch(t332);
    CHECK(o.bound == 4);
    CHECK(std::string(to_string(o.path)).rfind("233", 0) == 0);
}

TEST_CASE("split branches are subadditive") {
    qtest::Rng rng(209);
    for (int n = 0; n < 100; ++n) {
        Tensor3 t(2, 3, 3);
        for (int i = 0; i < 2; ++i) {
            HMatrix m(3, 3);
            for (int r = 0; r < 1 + n % 2; ++r) m += HMatrix::from_column(rng.vec(3)) * HMatrix::from_row(rng.vec(3));
            t.set_horizontal(i, m);
        }
        const DecomposeOutcome o = dispatch(t);
        CHECK(o.path == DecomposePath::P233Split);
        CHECK(int(o.decomposition.size()) <= h_rank(t.horizontal(0)) + h_rank(t.horizontal(1)));

        Tensor3 u(3, 3, 3);
        for (int i = 0; i < 3; ++i) {
            HMatrix m(3, 3);
            for (int r = 0; r < 1 + (n + i) % 2; ++r)
                m += HMatrix::from_column(rng.vec(3)) * HMatrix::from_row(rng.vec(3));
            u.set_horizontal(i, m);
        }
        const DecomposeOutcome ou = dispatch(u);
        CHECK(ou.path == DecomposePath::P333Split);
        int sum = 0;
        for (int i = 0; i < 3; ++i) sum += h_rank(u.horizontal(i));
        CHECK(int(ou.decomposition.size()) <= sum);
        CHECK(res(u, ou) <= 1e-10);
    }
}

TEST_CASE("3x2x3") {
    qtest::Rng rng(210);
    Tensor3 t = rng.tensor({3, 2, 3});
    t.set_frontal(0, HMatrix::from_column(rng.vec(3)) * HMatrix::from_row(rng.vec(3)) +
                         HMatrix::from_column(rng.vec(3)) * HMatrix::from_row(rng.vec(3)));
    DecomposeOutcome o = decompose_323(t);
    CHECK(o.decomposition.size() <= 4);
    CHECK(o.path == DecomposePath::P323SingularFrontal);
    CHECK(res(t, o) <= 1e-8);

    const Tensor3 w = qtest::witness_323();
    o = decompose_323(w);
    CHECK(o.decomposition.size() == 4);
    CHECK(res(w, o) <= 1e-8);
    CHECK(rank_certificate_square(w).verdict == CertVerdict::MoreThanN);

    const Batch b = batch({3, 2, 3}, 1000, 211);
    CHECK(b.failures == 0);
    CHECK(b.max_terms <= 4);
    CHECK(b.max_residual <= 1e-7);
}

TEST_CASE("3x2x3 perturbation") {
    const Quaternion w = 1 + J;
    // a u - b v = 1 for u = 1: the cubic term survives
    std::vector<Complex> p = char_poly(chi_adjoint(normal_form_m(w, 1.0, 0.7)));
    CHECK(std::abs(p[3] - Complex(-2.0)) <= 1e-9);
    CHECK(std::abs(p[6] - Complex((1.0 + 0.49) * 2.0)) <= 1e-9);

    const Perturbation323 pt = perturbation_323(w);
    CHECK(std::abs(w.w * pt.u - w.x * pt.v) <= 1e-15);
    CHECK(std::hypot(pt.u, pt.v) == doctest::Approx(1.0));
    p = char_poly(chi_adjoint(normal_form_m(w, pt.u, pt.v)));
    const double c = (pt.u * pt.u + pt.v * pt.v) * w.norm2();
    for (int n = 1; n <= 5; ++n) CHECK(std::abs(p[n]) <= 1e-9);
    CHECK(std::abs(p[6] - c) <= 1e-9);
    CHECK(is_diagonalizable(normal_form_m(w, pt.u, pt.v)).diagonalizable);

    const Perturbation323 alt = perturbation_323(w, 1);
    CHECK((alt.u != pt.u || alt.v != pt.v));
    CHECK(std::abs(w.w * alt.u - w.x * alt.v) <= 1e-15);
}

TEST_CASE("3x3x3") {
    CHECK(decompose_333(Tensor3(3, 3, 3)).decomposition.size() == 0);
    qtest::Rng rng(212);
    Tensor3 t(3, 3, 3);
    for (int i = 0; i < 3; ++i) t.set_horizontal(i, HMatrix::from_column(rng.vec(3)) * HMatrix::from_row(rng.vec(3)));
    DecomposeOutcome o = decompose_333(t);
    CHECK(o.decomposition.size() <= 3);
    CHECK(res(t, o) <= 1e-10);

    const Batch b = batch({3, 3, 3}, 1000, 213);
    CHECK(b.failures == 0);
    CHECK(b.max_terms <= 6);
    CHECK(b.max_residual <= 1e-7);
}

TEST_CASE("3x3x3 complex five-term formula") {
    const Tensor3 t = pattern_333(1, 1, 1, 1, 1, 0, 0, 1);
    const DecomposeOutcome o = decompose_333_complex_subcase(t);
    CHECK(o.decomposition.size() == 5);
    CHECK(res(t, o) <= 1e-12);
    CHECK(o.path == DecomposePath::P333Complex);

    Tensor3 off = t;
    off(2, 2, 2) = 1.0;
    CHECK(kind_of([&] { decompose_333_complex_subcase(off); }) == ErrorKind::PreconditionViolated);
    // R = A11 C12 + B11 C22 = 0
    CHECK(kind_of([&] { decompose_333_complex_subcase(pattern_333(1, 1, -1, 1, 1, 1, 0, 1)); }) ==
          ErrorKind::PreconditionViolated);
    CHECK(kind_of([&] { decompose_333_complex_subcase(random_tensor({3, 3, 3}, 1)); }) ==
          ErrorKind::PreconditionViolated);

    qtest::Rng rng(214);
    auto rc = [&] { return Complex(rng.uniform(), rng.uniform()); };
    int tested = 0;
    double worst = 0;
    while (tested < 1000) {
        const Complex a11 = rc(), a22 = rc(), b11 = rc(), b22 = rc(), c11 = rc(), c12 = rc(), c21 = rc(), c22 = rc();
        const Complex s = c11 * c22 - c12 * c21, r = a11 * c12 + b11 * c22;
        if (std::abs(s) < 0.1 || std::abs(r) < 0.1 || std::abs(a11) < 0.1 || std::abs(b22) < 0.1 ||
            std::abs(c22) < 0.1)
            continue;
        ++tested;
        const Tensor3 u = pattern_333(a11, a22, b11, b22, c11, c12, c21, c22);
        const DecomposeOutcome ou = decompose_333_complex_subcase(u);
        CHECK(ou.decomposition.size() == 5);
        worst = std::max(worst, res(u, ou));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("dispatch routing") {
    DecomposeOutcome o = dispatch(random_tensor({2, 2, 2}, 3));
    CHECK(o.bound == 3);
    CHECK(o.path == DecomposePath::P222Prop);

    qtest::Rng rng(215);
    Tensor3 m(1, 3, 3);
    const HMatrix a = HMatrix::from_column(rng.vec(3)) * HMatrix::from_row(rng.vec(3)) +
                      HMatrix::from_column(rng.vec(3)) * HMatrix::from_row(rng.vec(3));
    m.set_horizontal(0, a);
    o = dispatch(m);
    CHECK(o.path == DecomposePath::MatrixRoute);
    CHECK(int(o.decomposition.size()) == h_rank(a));
    CHECK(o.decomposition.size() <= 3);
    CHECK(res(m, o) <= 1e-12);

    for (const Dims& d : {Dims{3, 1, 2}, Dims{2, 2, 1}, Dims{1, 1, 1}}) {
        const Tensor3 t = random_tensor(d, 9);
        o = dispatch(t);
        CHECK(int(o.decomposition.size()) <= shape_bound(d));
        CHECK(res(t, o) <= 1e-12);
    }
}

TEST_CASE("scale and determinism") {
    for (const Dims& d : {Dims{2, 2, 2}, Dims{2, 3, 2}, Dims{3, 2, 3}, Dims{3, 3, 3}}) {
        Tensor3 t = random_tensor(d, 77);
        for (double s : {1e-6, 1e6}) {
            Tensor3 u = t;
            for (int i = 0; i < d[0]; ++i)
                for (int j = 0; j < d[1]; ++j)
                    for (int k = 0; k < d[2]; ++k) u(i, j, k) = s * t(i, j, k);
            const DecomposeOutcome o = dispatch(u);
            CHECK(int(o.decomposition.size()) <= o.bound);
            CHECK(res(u, o) <= 1e-7);
        }
        const DecomposeOutcome a = dispatch(t), b = dispatch(t);
        REQUIRE(a.decomposition.size() == b.decomposition.size());
        for (std::size_t l = 0; l < a.decomposition.size(); ++l)
            CHECK(a.decomposition.terms[l] == b.decomposition.terms[l]);
    }
}

TEST_CASE("other distributions") {
    for (Distribution dist : {Distribution::Unit, Distribution::Complex, Distribution::Real})
        for (const Dims& d : {Dims{2, 2, 2}, Dims{2, 2, 3}, Dims{2, 3, 2}, Dims{2, 3, 3}, Dims{3, 3, 2},
                              Dims{3, 2, 3}, Dims{3, 3, 3}}) {
            const Batch b = batch(d, 100, 216, dist);
            CHECK(b.failures == 0);
            CHECK(b.max_terms <= shape_bound(d));
            CHECK(b.max_residual <= 1e-7);
        }
}

TEST_CASE("branch totality") {
    std::set<DecomposePath> seen;
    int failures = 0;
    const Dims shapes[] = {{2, 2, 2}, {2, 2, 3}, {3, 2, 2}, {2, 3, 2}, {2, 3, 3},
                           {3, 3, 2}, {3, 2, 3}, {3, 3, 3}, {1, 3, 3}};
    for (const Dims& d : shapes)
        for (int n = 0; n < 400; ++n) {
            const Tensor3 t = structured(d, derive_seed(217, n));
            try {
                const DecomposeOutcome o = dispatch(t);
                seen.insert(o.path);
                CHECK(int(o.decomposition.size()) <= o.bound);
                CHECK(res(t, o) <= 1e-7);
            } catch (const Error&) {
                ++failures;
            }
        }
    for (int n = 0; n < 100; ++n) seen.insert(dispatch(jordan_232(derive_seed(218, n))).path);
    seen.insert(decompose_232(Tensor3::from_frontal({HMatrix::identity(2), mat2(I, 1, 0, I), mat2(J, 1, 0, J)})).path);
    seen.insert(decompose_232_complex(Tensor3::from_frontal({HMatrix::identity(2), mat2(0, 1, 1, 0), mat2(1, 1, 2, 2)})).path);
    seen.insert(decompose_333_complex_subcase(pattern_333(1, 1, 1, 1, 1, 0, 0, 1)).path);
    CHECK(failures == 0);

    // Both need a zero column in an invertible 3x3 slice.
    const std::set<DecomposePath> unreachable{DecomposePath::P233ToP232, DecomposePath::P233Fiber};
    for (int p = 0; p < decompose_path_count; ++p) {
        const auto path = DecomposePath(p);
        if (unreachable.count(path)) continue;
        INFO("path " << to_string(path));
        CHECK(seen.count(path) == 1);
    }
}
