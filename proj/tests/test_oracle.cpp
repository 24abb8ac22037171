#include <cmath>

#include "doctest.h"
#include "qtrank/error.hpp"
#include "qtrank/oracle.hpp"
#include "test_util.hpp"

using namespace qtrank;
using qtest::mat2;

TEST_CASE("verify") {
    qtest::Rng rng(301);
    Decomposition d;
    d.dims = {2, 3, 2};
    for (int l = 0; l < 3; ++l) d.terms.push_back({rng.vec(2), rng.vec(3), rng.vec(2)});
    const Tensor3 t = densify(d);
    VerifyResult v = verify(t, d, 1e-12);
    CHECK(v.residual == 0.0);
    CHECK(v.ok);

    Decomposition g;
    g.dims = {2, 3, 2};
    g.terms.push_back({{1, 4}, {1, -1, 2}, {2, 3}});
    const Tensor3 golden = Tensor3::from_frontal({mat2(2, 3, 8, 12), mat2(-2, -3, -8, -12), mat2(4, 6, 16, 24)});
    v = verify(golden, g, 0.0);
    CHECK(v.residual == 0.0);
    CHECK(v.ok);

    Decomposition p = d;
    p.terms[1].b[2] += Quaternion(1e-3);
    v = verify(t, p, 1e-6);
    CHECK_FALSE(v.ok);
    CHECK(v.residual > 1e-6);

    Decomposition wrong;
    wrong.dims = {2, 2, 2};
    try {
        verify(t, wrong, 1e-6);
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DimensionMismatch);
    }
}

TEST_CASE("random tensors") {
    const Dims d{3, 2, 3};
    CHECK(random_tensor(d, 42) == random_tensor(d, 42));
    CHECK_FALSE(random_tensor(d, 42) == random_tensor(d, 43));
    CHECK(random_tensor(d, 42).dims() == d);

    const Tensor3 r = random_tensor(d, 5, Distribution::Real);
    const Tensor3 c = random_tensor(d, 5, Distribution::Complex);
    const Tensor3 u = random_tensor(d, 5, Distribution::Unit);
    const Tensor3 f = random_tensor(d, 5, Distribution::Uniform);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 3; ++k) {
                CHECK(r(i, j, k).imag().is_zero());
                CHECK(c(i, j, k).y == 0.0);
                CHECK(c(i, j, k).z == 0.0);
                CHECK(u(i, j, k).norm() == doctest::Approx(1.0).epsilon(1e-14));
                CHECK(f(i, j, k).norm2() <= 4.0);
            }
    CHECK(parse_distribution("unit") == Distribution::Unit);
    CHECK(std::string(to_string(Distribution::Complex)) == "complex");
    for (Distribution x : {Distribution::Uniform, Distribution::Unit, Distribution::Complex, Distribution::Real})
        CHECK(parse_distribution(to_string(x)) == x);
    CHECK_THROWS_AS(parse_distribution("gaussian"), Error);
}

TEST_CASE("als fits a simple tensor") {
    qtest::Rng rng(302);
    const Tensor3 t = densify(SimpleTensor{rng.vec(2), rng.vec(3), rng.vec(2)});
    const AlsResult r = als_fit(t, 1, 50, 1);
    CHECK(r.residual <= 1e-6);
    CHECK(r.fit.size() == 1);
    CHECK(relative_error(t, densify(r.fit)) <= 1e-5);
}

TEST_CASE("als objective is monotone") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Tensor3 t = random_tensor({2, 3, 3}, seed);
        const AlsResult r = als_fit(t, 3, 40, seed);
        REQUIRE(r.objective.size() >= 2);
        for (std::size_t n = 1; n < r.objective.size(); ++n)
            CHECK(r.objective[n] <= r.objective[n - 1] * (1 + 1e-10) + 1e-14);
    }
}

TEST_CASE("als cannot fit the 2x2x2 witness with two terms") {
    const Tensor3 w = qtest::witness_222();
    double best = 1.0;
    for (std::uint64_t seed = 1; seed <= 32; ++seed) best = std::min(best, als_fit(w, 2, 200, seed).residual);
    // evidence only: two-term fits stall while three terms fit exactly
    CHECK(best > 1e-3);
    CHECK(als_fit(w, 3, 300, 1).residual <= 1e-6);
}

TEST_CASE("als with six terms on 3x3x3") {
    double best = 1.0;
    for (std::uint64_t seed = 1; seed <= 4 && best > 1e-5; ++seed)
        best = std::min(best, als_fit(random_tensor({3, 3, 3}, 9), 6, 400, seed).residual);
    CHECK(best <= 1e-5);
}

TEST_CASE("suites") {
    SuiteReport r = run_suite({2, 2, 2}, 100, 7, 1e-7);
    CHECK(r.ok());
    CHECK(r.cases == 100);
    CHECK(r.bound == 3);
    CHECK(r.max_terms <= 3);
    CHECK(r.max_residual <= 1e-7);
    int hits = 0;
    for (int c : r.path_counts) hits += c;
    CHECK(hits == 100);

    r = run_suite({3, 3, 3}, 100, 7, 1e-7);
    CHECK(r.ok());
    CHECK(r.max_terms <= 6);

    r = run_suite({2, 3, 2}, 0, 7, 1e-7);
    CHECK(r.ok());
    CHECK(r.cases == 0);
    CHECK(r.max_terms == 0);

    CHECK(case_seed(7, 0) != case_seed(7, 1));
    CHECK(case_seed(7, 0) != case_seed(8, 0));

    // a tolerance nothing can meet turns every nonzero case into a failure
    r = run_suite({2, 2, 2}, 10, 7, 0.0);
    CHECK_FALSE(r.ok());
    for (std::uint64_t s : r.failures) {
        bool listed = false;
        for (int n = 0; n < 10; ++n) listed = listed || case_seed(7, n) == s;
        CHECK(listed);
    }
}

TEST_CASE("suite determinism") {
    for (const Dims& d : {Dims{2, 3, 2}, Dims{3, 2, 3}}) {
        const SuiteReport a = run_suite(d, 200, 11, 1e-7);
        const SuiteReport b = run_suite(d, 200, 11, 1e-7);
        const SuiteReport s = run_suite_serial(d, 200, 11, 1e-7);
        CHECK(a == b);
        CHECK(a == s);
    }
}
