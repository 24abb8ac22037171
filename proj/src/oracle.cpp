#include "qtrank/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "qtrank/error.hpp"
#include "qtrank/seed.hpp"

namespace qtrank {

VerifyResult verify(const Tensor3& t, const Decomposition& d, double tol) {
    if (t.dims() != d.dims)
        throw Error(ErrorKind::DimensionMismatch,
                    "tensor is " + dims_string(t.dims()) + " but decomposition is " + dims_string(d.dims));
    const double r = relative_error(t, densify(d));
    return {r, r <= tol};
}

const char* to_string(Distribution d) {
    switch (d) {
        case Distribution::Uniform: return "uniform";
        case Distribution::Unit: return "unit";
        case Distribution::Complex: return "complex";
        case Distribution::Real: return "real";
    }
    return "uniform";
}

Distribution parse_distribution(const std::string& s) {
    if (s == "uniform") return Distribution::Uniform;
    if (s == "unit") return Distribution::Unit;
    if (s == "complex") return Distribution::Complex;
    if (s == "real") return Distribution::Real;
    throw Error(ErrorKind::Parse, "unknown distribution '" + s + "'");
}

Tensor3 random_tensor(const Dims& shape, std::uint64_t seed, Distribution dist) {
    Tensor3 t(shape);
    std::mt19937_64 rng(splitmix64(seed));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < shape[0]; ++i)
        for (int j = 0; j < shape[1]; ++j)
            for (int k = 0; k < shape[2]; ++k) {
                Quaternion q{u(rng), u(rng), u(rng), u(rng)};
                switch (dist) {
                    case Distribution::Uniform: break;
                    case Distribution::Unit: {
                        const double n = q.norm();
                        q = n > 0.0 ? q / n : Quaternion{1.0};
                        break;
                    }
                    case Distribution::Complex: q.y = q.z = 0.0; break;
                    case Distribution::Real: q.x = q.y = q.z = 0.0; break;
                }
                t(i, j, k) = q;
            }
    return t;
}

namespace {

using Mat4 = Eigen::Matrix4d;

Mat4 left4(const Quaternion& q) {
    double m[16];
    left_mult_matrix(q, m);
    return Eigen::Map<Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(m);
}

Mat4 right4(const Quaternion& q) {
    double m[16];
    right_mult_matrix(q, m);
    return Eigen::Map<Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(m);
}

Eigen::Vector4d vec(const Quaternion& q) { return {q.w, q.x, q.y, q.z}; }
Quaternion quat(const Eigen::Ref<const Eigen::VectorXd>& v, int at) {
    return {v(at), v(at + 1), v(at + 2), v(at + 3)};
}

// Factor matrices: a (n1 x r), b (n2 x r), c (n3 x r).
struct Factors {
    std::vector<HVector> a, b, c;   // [l][index]
};

Decomposition to_decomposition(const Factors& f, const Dims& dims) {
    Decomposition d;
    d.dims = dims;
    for (std::size_t l = 0; l < f.a.size(); ++l) d.terms.push_back({f.a[l], f.b[l], f.c[l]});
    return d;
}

double objective(const Tensor3& t, const Factors& f) {
    const Tensor3 s = densify(to_decomposition(f, t.dims()));
    double o = 0.0;
    for (int i = 0; i < t.n1(); ++i)
        for (int j = 0; j < t.n2(); ++j)
            for (int k = 0; k < t.n3(); ++k) o += (t(i, j, k) - s(i, j, k)).norm2();
    return o;
}

// Solves min sum ||M x - y||^2 + ridge ||x||^2 given the normal equations.
Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& ata, const Eigen::VectorXd& aty) {
    const Eigen::MatrixXd reg = ata + 1e-12 * Eigen::MatrixXd::Identity(ata.rows(), ata.cols());
    return reg.ldlt().solve(aty);
}

}  // namespace

AlsResult als_fit(const Tensor3& t, int r, int iters, std::uint64_t seed) {
    if (r < 1) throw Error(ErrorKind::PreconditionViolated, "als_fit needs r >= 1");
    const int n1 = t.n1(), n2 = t.n2(), n3 = t.n3();
    std::mt19937_64 rng(splitmix64(seed));
    std::normal_distribution<double> g;
    auto rq = [&] { return Quaternion{g(rng), g(rng), g(rng), g(rng)}; };
    Factors f;
    f.a.assign(r, HVector(n1));
    f.b.assign(r, HVector(n2));
    f.c.assign(r, HVector(n3));
    for (int l = 0; l < r; ++l) {
        for (auto& q : f.a[l]) q = rq();
        for (auto& q : f.b[l]) q = rq();
        for (auto& q : f.c[l]) q = rq();
    }
    double tn = 0.0;
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
            for (int k = 0; k < n3; ++k) tn += t(i, j, k).norm2();
    const double denom = tn > 0.0 ? std::sqrt(tn) : 1.0;

    AlsResult res;
    double best = objective(t, f);
    res.fit = to_decomposition(f, t.dims());
    res.residual = std::sqrt(best) / denom;
    const int m = 4 * r;
    for (int it = 0; it < iters; ++it) {
        // a-block: T(i,j,k) = sum_l a_il (b_jl c_kl)
        for (int i = 0; i < n1; ++i) {
            Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(m, m);
            Eigen::VectorXd aty = Eigen::VectorXd::Zero(m);
            for (int j = 0; j < n2; ++j)
                for (int k = 0; k < n3; ++k) {
                    Eigen::MatrixXd row(4, m);
                    for (int l = 0; l < r; ++l) row.block<4, 4>(0, 4 * l) = right4(f.b[l][j] * f.c[l][k]);
                    ata += row.transpose() * row;
                    aty += row.transpose() * vec(t(i, j, k));
                }
            const Eigen::VectorXd x = ridge_solve(ata, aty);
            for (int l = 0; l < r; ++l) f.a[l][i] = quat(x, 4 * l);
        }
        // b-block: a_il b_jl c_kl = L(a) R(c) b
        for (int j = 0; j < n2; ++j) {
            Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(m, m);
            Eigen::VectorXd aty = Eigen::VectorXd::Zero(m);
            for (int i = 0; i < n1; ++i)
                for (int k = 0; k < n3; ++k) {
                    Eigen::MatrixXd row(4, m);
                    for (int l = 0; l < r; ++l)
                        row.block<4, 4>(0, 4 * l) = left4(f.a[l][i]) * right4(f.c[l][k]);
                    ata += row.transpose() * row;
                    aty += row.transpose() * vec(t(i, j, k));
                }
            const Eigen::VectorXd x = ridge_solve(ata, aty);
            for (int l = 0; l < r; ++l) f.b[l][j] = quat(x, 4 * l);
        }
        // c-block: (a_il b_jl) c_kl
        for (int k = 0; k < n3; ++k) {
            Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(m, m);
            Eigen::VectorXd aty = Eigen::VectorXd::Zero(m);
            for (int i = 0; i < n1; ++i)
                for (int j = 0; j < n2; ++j) {
                    Eigen::MatrixXd row(4, m);
                    for (int l = 0; l < r; ++l) row.block<4, 4>(0, 4 * l) = left4(f.a[l][i] * f.b[l][j]);
                    ata += row.transpose() * row;
                    aty += row.transpose() * vec(t(i, j, k));
                }
            const Eigen::VectorXd x = ridge_solve(ata, aty);
            for (int l = 0; l < r; ++l) f.c[l][k] = quat(x, 4 * l);
        }
        const double o = objective(t, f);
        res.objective.push_back(o);
        if (o < best) {
            best = o;
            res.fit = to_decomposition(f, t.dims());
            res.residual = std::sqrt(best) / denom;
        }
    }
    return res;
}

std::uint64_t case_seed(std::uint64_t master_seed, int index) { return derive_seed(master_seed, std::uint64_t(index)); }

namespace {

struct CaseResult {
    bool ok = false;
    int terms = 0;
    double residual = 0.0;
    int attempts = 1;
    DecomposePath path = DecomposePath::Zero;
};

CaseResult run_case(const Dims& shape, std::uint64_t seed, double tol, Distribution dist) {
    CaseResult c;
    const Tensor3 t = random_tensor(shape, seed, dist);
    try {
        DecomposeOptions opts;
        opts.seed = seed;
        const DecomposeOutcome out = dispatch(t, opts);
        const VerifyResult v = verify(t, out.decomposition, tol);
        c.terms = int(out.decomposition.size());
        c.residual = v.residual;
        c.attempts = out.attempts;
        c.path = out.path;
        c.ok = v.ok && c.terms <= out.bound;
    } catch (const Error&) {
        c.ok = false;
    }
    return c;
}

SuiteReport aggregate(const Dims& shape, int n_cases, std::uint64_t master_seed, double tol, Distribution dist,
                      const std::vector<CaseResult>& cs) {
    SuiteReport r;
    r.shape = shape;
    r.cases = n_cases;
    r.master_seed = master_seed;
    r.tol = tol;
    r.dist = dist;
    r.bound = shape_bound(shape);
    for (int n = 0; n < n_cases; ++n) {
        const CaseResult& c = cs[n];
        if (!c.ok) {
            r.failures.push_back(case_seed(master_seed, n));
            continue;
        }
        r.max_residual = std::max(r.max_residual, c.residual);
        r.max_terms = std::max(r.max_terms, c.terms);
        if (c.attempts > 1) ++r.retried;
        ++r.path_counts[std::size_t(c.path)];
    }
    return r;
}

}  // namespace

SuiteReport run_suite(const Dims& shape, int n_cases, std::uint64_t master_seed, double tol, Distribution dist) {
    shape_bound(shape);
    std::vector<CaseResult> cs(std::max(n_cases, 0));
#pragma omp parallel for schedule(dynamic, 4)
    for (int n = 0; n < n_cases; ++n) cs[n] = run_case(shape, case_seed(master_seed, n), tol, dist);
    return aggregate(shape, std::max(n_cases, 0), master_seed, tol, dist, cs);
}

SuiteReport run_suite_serial(const Dims& shape, int n_cases, std::uint64_t master_seed, double tol,
                             Distribution dist) {
    shape_bound(shape);
    std::vector<CaseResult> cs(std::max(n_cases, 0));
    for (int n = 0; n < n_cases; ++n) cs[n] = run_case(shape, case_seed(master_seed, n), tol, dist);
    return aggregate(shape, std::max(n_cases, 0), master_seed, tol, dist, cs);
}

}  // namespace qtrank
