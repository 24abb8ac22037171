#include <cmath>

#include "doctest.h"
#include "qtrank/error.hpp"
#include "qtrank/spectral.hpp"
#include "test_util.hpp"

using namespace qtrank;
using qtest::mat2;

namespace {

const Quaternion I = Quaternion::i(), J = Quaternion::j(), K = Quaternion::k();

double cmax(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

int chi_rank(const HMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0;
    Eigen::JacobiSVD<CMatrix> svd(chi_adjoint(a));
    const auto& s = svd.singularValues();
    int r = 0;
    for (int n = 0; n < s.size(); ++n)
        if (s(n) > 1e-10 * std::max(1.0, s(0))) ++r;
    return r;
}

HMatrix random_invertible(qtest::Rng& rng, int n) {
    for (;;) {
        HMatrix m = rng.matrix(n, n);
        if (inverse_condition(m) > 1e-3) return m;
    }
}

}  // namespace

TEST_CASE("chi_adjoint") {
    CMatrix expect(2, 2);
    expect << 0, 1, -1, 0;
    CHECK(chi_adjoint(HMatrix{{J}}) == expect);
    CHECK(chi_adjoint(HMatrix::identity(3)) == CMatrix::Identity(6, 6));

    qtest::Rng rng(21);
    double sum = 0, prod = 0;
    for (int n = 0; n < 1000; ++n) {
        const HMatrix a = rng.matrix(3, 3), b = rng.matrix(3, 3);
        sum = std::max(sum, cmax(chi_adjoint(a + b) - chi_adjoint(a) - chi_adjoint(b)));
        prod = std::max(prod, cmax(chi_adjoint(a * b) - chi_adjoint(a) * chi_adjoint(b)));
    }
    CHECK(sum <= 1e-12);
    CHECK(prod <= 1e-12);
}

TEST_CASE("vector bridge") {
    qtest::Rng rng(22);
    for (int n = 0; n < 100; ++n) {
        const HMatrix a = rng.matrix(3, 3);
        const HVector v = rng.vec(3);
        const CVector z = to_complex_vector(v);
        const HVector back = to_quaternion_vector(z);
        for (int r = 0; r < 3; ++r) CHECK(max_abs_diff(back[r], v[r]) <= 1e-15);
        const HVector av = a * std::span<const Quaternion>(v);
        const HVector chiav = to_quaternion_vector(chi_adjoint(a) * z);
        for (int r = 0; r < 3; ++r) CHECK(max_abs_diff(av[r], chiav[r]) <= 1e-14);
        // right multiplication by a complex scalar
        const Complex c(0.3, -1.2);
        const HVector vc = to_quaternion_vector(z * c);
        for (int r = 0; r < 3; ++r) CHECK(max_abs_diff(vc[r], v[r] * Quaternion::from_complex(c)) <= 1e-14);
    }
}

TEST_CASE("h_rank") {
    CHECK(h_rank(mat2(I, I, I + J, I + J)) == 1);
    CHECK(h_rank(HMatrix(3, 3)) == 0);
    CHECK(h_rank(mat2(1, I, J, K)) == 2);
    // row 2 = (1+j) * row 1 is a left multiple
    CHECK(h_rank(mat2(1, I, 1 + J, (1 + J) * I)) == 1);
    // a right multiple of a row is not a left multiple in general
    CHECK(h_rank(mat2(1, I, J, I * J)) == 2);

    qtest::Rng rng(23);
    for (int n = 0; n < 200; ++n) {
        HMatrix a(3, 3);
        const int target = n % 4;
        for (int t = 0; t < target; ++t) a += HMatrix::from_column(rng.vec(3)) * HMatrix::from_row(rng.vec(3));
        const int r = h_rank(a);
        CHECK(r == target);
        CHECK(r <= 3);
        CHECK(2 * r == chi_rank(a));
        const HMatrix l = random_invertible(rng, 3), rr = random_invertible(rng, 3);
        CHECK(h_rank(l * a * rr) == r);
    }
}

TEST_CASE("h_inverse") {
    CHECK(h_inverse(HMatrix::identity(3)) == HMatrix::identity(3));
    const Quaternion dj[2] = {I, J};
    const Quaternion dinv[2] = {-I, -J};
    CHECK(max_abs_diff(h_inverse(HMatrix::diagonal(dj)), HMatrix::diagonal(dinv)) <= 1e-16);
    CHECK_THROWS_AS(h_inverse(HMatrix(2, 3)), Error);
    try {
        h_inverse(mat2(I, I, I + J, I + J));
        FAIL("expected Singular");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Singular);
    }
    try {
        h_inverse(HMatrix(2, 3));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonSquare);
    }

    qtest::Rng rng(24);
    int tested = 0;
    while (tested < 500) {
        const HMatrix a = rng.matrix(3, 3);
        if (inverse_condition(a) < 1e-6) continue;
        ++tested;
        const HMatrix inv = h_inverse(a);
        CHECK(max_abs_diff(a * inv, HMatrix::identity(3)) <= 1e-9);
        CHECK(max_abs_diff(inv * a, HMatrix::identity(3)) <= 1e-9);
        CHECK((h_rank(a) == 3) == (chi_rank(a) == 6));
    }
}

TEST_CASE("h_solve and null vectors") {
    qtest::Rng rng(25);
    for (int n = 0; n < 100; ++n) {
        const HMatrix a = random_invertible(rng, 3);
        const HVector b = rng.vec(3);
        const HVector x = h_solve(a, b);
        const HVector ax = a * std::span<const Quaternion>(x);
        for (int r = 0; r < 3; ++r) CHECK(max_abs_diff(ax[r], b[r]) <= 1e-10);

        // singular by construction: third column = c1 p + c2 q
        HMatrix s = rng.matrix(3, 3);
        const Quaternion p = rng.quat(), q = rng.quat();
        for (int r = 0; r < 3; ++r) s(r, 2) = s(r, 0) * p + s(r, 1) * q;
        const HVector v = right_null_vector(s);
        const HVector sv = s * std::span<const Quaternion>(v);
        double vn = 0, svn = 0;
        for (int r = 0; r < 3; ++r) {
            vn += v[r].norm2();
            svn = std::max(svn, sv[r].norm());
        }
        CHECK(std::sqrt(vn) == doctest::Approx(1.0));
        CHECK(svn <= 1e-12);
        CHECK(sigma_min(s) <= 1e-12);
        const HVector u = left_null_vector(s.adjoint());
        HVector us(3);
        for (int c = 0; c < 3; ++c)
            for (int r = 0; r < 3; ++r) us[c] += u[r] * s.adjoint()(r, c);
        for (int c = 0; c < 3; ++c) CHECK(us[c].norm() <= 1e-12);
    }
    CHECK(inverse_condition(HMatrix(2, 2)) == 0.0);
    CHECK(inverse_condition(HMatrix::identity(2)) == doctest::Approx(1.0));
}

TEST_CASE("rank factorization") {
    qtest::Rng rng(26);
    for (int n = 0; n < 100; ++n) {
        HMatrix a(3, 3);
        const int target = 1 + n % 3;
        for (int t = 0; t < target; ++t) a += HMatrix::from_column(rng.vec(3)) * HMatrix::from_row(rng.vec(3));
        const auto f = rank_factorization(a);
        CHECK(int(f.size()) == target);
        HMatrix sum(3, 3);
        for (const auto& [p, q] : f) sum += HMatrix::from_column(p) * HMatrix::from_row(q);
        CHECK(max_abs_diff(sum, a) <= 1e-12);
    }
}

TEST_CASE("complex_eigen") {
    CMatrix d(2, 2);
    d << 1, 0, 0, 2;
    EigenReport r = complex_eigen(d);
    REQUIRE(r.eigenvalues.size() == 2);
    CHECK(std::abs(r.eigenvalues[0] - Complex(1)) <= 1e-12);
    CHECK(std::abs(r.eigenvalues[1] - Complex(2)) <= 1e-12);
    CHECK(r.diagonalizable);

    CMatrix rot(2, 2);
    rot << 0, -1, 1, 0;
    r = complex_eigen(rot);
    REQUIRE(r.eigenvalues.size() == 2);
    CHECK(std::abs(r.eigenvalues[0] - Complex(0, -1)) <= 1e-12);
    CHECK(std::abs(r.eigenvalues[1] - Complex(0, 1)) <= 1e-12);
    CHECK(r.diagonalizable);

    CMatrix jb(2, 2);
    jb << 0, 1, 0, 0;
    r = complex_eigen(jb);
    REQUIRE(r.clusters.size() == 1);
    CHECK(std::abs(r.clusters[0].value) <= 1e-12);
    CHECK(r.clusters[0].algebraic == 2);
    CHECK(r.clusters[0].geometric == 1);
    CHECK_FALSE(r.diagonalizable);

    qtest::Rng rng(27);
    for (int n = 0; n < 50; ++n) {
        const CMatrix c = chi_adjoint(rng.matrix(3, 3));
        r = complex_eigen(c);
        int alg = 0;
        for (const auto& cl : r.clusters) {
            alg += cl.algebraic;
            CHECK(cl.geometric <= cl.algebraic);
        }
        CHECK(alg == 6);
    }
}

TEST_CASE("is_diagonalizable") {
    CHECK_FALSE(is_diagonalizable(mat2(0, 1, 0, 0)).diagonalizable);
    const Quaternion dij[2] = {I, J};
    CHECK(is_diagonalizable(HMatrix::diagonal(dij)).diagonalizable);
    const HMatrix b = qtest::e_matrix(3, {{0, 2}, {1, 1}});
    CHECK(h_rank(b) == 2);
    CHECK(h_rank(b * b) == 1);
    CHECK_FALSE(is_diagonalizable(b).diagonalizable);

    qtest::Rng rng(28);
    for (int n = 0; n < 100; ++n) {
        const HMatrix a = rng.matrix(n % 2 ? 2 : 3, n % 2 ? 2 : 3);
        const bool flag = is_diagonalizable(a).diagonalizable;
        CHECK(flag);
        CHECK(flag == simultaneous_diagonalize({a}).p.has_value());
        const auto dg = diagonalize(a);
        REQUIRE(dg.has_value());
        const HMatrix pap = h_inverse(dg->p) * a * dg->p;
        for (int r = 0; r < a.rows(); ++r)
            for (int c = 0; c < a.cols(); ++c)
                CHECK(max_abs_diff(pap(r, c), r == c ? dg->diagonal[r] : Quaternion{}) <= 1e-8);
    }
}

TEST_CASE("schur_triangularize") {
    const HMatrix t0{{Quaternion(1, 2, 0, 0), 3 + J}, {0, Quaternion(0, 1, 0, 0)}};
    SchurForm s = schur_triangularize(t0);
    CHECK(max_abs_diff(s.u, HMatrix::identity(2)) <= 1e-12);
    CHECK(max_abs_diff(s.t, t0) <= 1e-12);

    const Quaternion q{0.5, 0.3, -1.2, 0.4};
    s = schur_triangularize(HMatrix{{q}});
    CHECK(std::abs(s.t(0, 0).w - 0.5) <= 1e-12);
    CHECK(std::abs(s.t(0, 0).x - q.imag().norm()) <= 1e-12);
    CHECK(s.t(0, 0).is_complex(1e-12));

    qtest::Rng rng(29);
    for (int n = 0; n < 200; ++n) {
        const HMatrix a = rng.matrix(2, 2);
        s = schur_triangularize(a);
        CHECK(max_abs_diff(s.u * s.t * s.u.adjoint(), a) <= 1e-9);
        CHECK(max_abs_diff(s.u * s.u.adjoint(), HMatrix::identity(2)) <= 1e-12);
        CHECK(s.t(1, 0).norm() <= 1e-10);
        CHECK(s.t(0, 0).is_complex(1e-10));
        CHECK(s.t(1, 1).is_complex(1e-10));
        CHECK(s.t(0, 0).x >= -1e-10);
    }
}

TEST_CASE("right_eigenpair") {
    qtest::Rng rng(30);
    for (int n = 0; n < 100; ++n) {
        const HMatrix a = rng.matrix(3, 3);
        const RightEigenpair e = right_eigenpair(a);
        const HVector av = a * std::span<const Quaternion>(e.v);
        const Quaternion lam = Quaternion::from_complex(e.lambda);
        double err = 0;
        for (int r = 0; r < 3; ++r) err = std::max(err, (av[r] - e.v[r] * lam).norm());
        CHECK(err <= 1e-9);
        CHECK(e.lambda.imag() >= 0.0);
    }
}

TEST_CASE("simultaneous_diagonalize") {
    const Quaternion dij[2] = {I, J};
    const Quaternion d12[2] = {1, 2};
    SimDiagResult r = simultaneous_diagonalize({HMatrix::diagonal(dij), HMatrix::diagonal(d12)});
    REQUIRE(r.p.has_value());
    const HMatrix p = *r.p;
    CHECK(h_rank(p) == 2);
    // columns may be rescaled; P^{-1} M P must be diagonal for both
    for (const HMatrix& m : {HMatrix::diagonal(dij), HMatrix::diagonal(d12)}) {
        const HMatrix x = h_inverse(p) * m * p;
        CHECK(x(0, 1).norm() <= 1e-9);
        CHECK(x(1, 0).norm() <= 1e-9);
    }

    CHECK_FALSE(simultaneous_diagonalize({HMatrix::identity(2), mat2(0, 1, 0, 0)}).p.has_value());

    qtest::Rng rng(31);
    for (int n = 0; n < 50; ++n) {
        const HMatrix a = rng.matrix(3, 3);
        const auto res = simultaneous_diagonalize({a, a * a});
        REQUIRE(res.p.has_value());
        for (const HMatrix& m : {a, a * a}) {
            const HMatrix x = h_inverse(*res.p) * m * *res.p;
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c)
                    if (r != c) CHECK(x(r, c).norm() <= 1e-7 * (1 + m.max_norm()));
        }
    }
    // a defective member alone already fails
    CHECK_FALSE(simultaneous_diagonalize({qtest::e_matrix(3, {{0, 2}, {1, 1}})}).p.has_value());
}

TEST_CASE("left_eigen_search") {
    const Quaternion q1{0.3, 1, -2, 0.5}, q2{-1, 0.2, 0.1, 3};
    const Quaternion dq[2] = {q1, q2};
    const HMatrix m = HMatrix::diagonal(dq);
    LeftEigenResult r = left_eigen_search(m);
    CHECK(r.sigma <= 1e-8);
    CHECK(sigma_min(r.x0 * HMatrix::identity(2) + m) <= 1e-8 * (1 + m.max_norm()));
    CHECK(sigma_min(-q1 * HMatrix::identity(2) + m) == doctest::Approx(0.0));

    qtest::Rng rng(32);
    for (int n = 0; n < 50; ++n) {
        HMatrix c(3, 3);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) c(a, b) = rng.complex();
        r = left_eigen_search(c);
        CHECK(sigma_min(r.x0 * HMatrix::identity(3) + c) <= 1e-8 * (1 + c.max_norm()));
    }
    for (int n = 0; n < 100; ++n) {
        const HMatrix a = random_invertible(rng, 3), b = rng.matrix(3, 3);
        const HMatrix mm = b * h_inverse(a);
        r = left_eigen_search(mm);
        CHECK(r.sigma <= 1e-8 * std::max(1.0, mm.max_norm()));
        // x0 I + B A^{-1} singular means x0 A + B singular
        CHECK(h_rank(r.x0 * a + b, 1e-6) <= 2);
    }
    for (int n = 0; n < 50; ++n) {
        const HMatrix a = rng.matrix(2, 2);
        r = left_eigen_search(a);
        CHECK(sigma_min(r.x0 * HMatrix::identity(2) + a) <= 1e-8 * std::max(1.0, a.max_norm()));
    }
}
