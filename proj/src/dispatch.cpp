#include <random>
#include <string>

#include "decompose_internal.hpp"
#include "qtrank/seed.hpp"

namespace qtrank {

namespace {

using detail::Ctx;
using Core = Decomposition (*)(const Tensor3&, Ctx&);

// Random unitary n x n quaternion matrix: Gram-Schmidt on Gaussian columns.
HMatrix random_unitary(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    HMatrix u(n, n);
    for (int c = 0; c < n; ++c) {
        HVector v(n);
        for (auto& q : v) q = {g(rng), g(rng), g(rng), g(rng)};
        for (int p = 0; p < c; ++p) {
            Quaternion dot = 0.0;
            for (int r = 0; r < n; ++r) dot += u(r, p).conj() * v[r];
            for (int r = 0; r < n; ++r) v[r] -= u(r, p) * dot;
        }
        double nn = 0.0;
        for (const auto& q : v) nn += q.norm2();
        nn = std::sqrt(nn);
        for (int r = 0; r < n; ++r) u(r, c) = v[r] / nn;
    }
    return u;
}

Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ();
}

void require_dims(const Tensor3& t, std::initializer_list<Dims> allowed, const char* what) {
    for (const Dims& d : allowed)
        if (t.dims() == d) return;
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " does not accept shape " + dims_string(t.dims()));
}

// Direct run, then preconditioned retries; every candidate is verified against t.
DecomposeOutcome run(const Tensor3& t, const DecomposeOptions& opts, Core core) {
    DecomposeOutcome out;
    out.bound = shape_bound(t.dims());
    // cores see a tensor of unit max-norm, so their absolute thresholds are scale free
    const double scale = t.max_norm();
    Tensor3 unit = t;
    if (scale > 0.0)
        for (int i = 0; i < t.n1(); ++i)
            for (int j = 0; j < t.n2(); ++j)
                for (int k = 0; k < t.n3(); ++k) unit(i, j, k) = t(i, j, k) / scale;
    std::string last = "no attempt made";
    // An entry within noise of the branch threshold can pick the wrong branch and
    // divide by it; coarser thresholds come first, preconditioning after.
    static constexpr double branch_steps[] = {1.0, 10.0, 100.0};
    int tries = 0;
    for (int attempt = 0; attempt <= opts.retries; ++attempt) {
        Tensor3 work = unit;
        OpLog log;
        if (attempt > 0) {
            std::mt19937_64 rng(derive_seed(opts.seed, std::uint64_t(attempt)));
            work = apply_op(work, left_mode1(random_unitary(t.n1(), rng)), log);
            work = apply_op(work, right_mode3(random_unitary(t.n3(), rng)), log);
            work = apply_op(work, real_mode2(random_orthogonal(t.n2(), rng)), log);
        }
        for (double step : branch_steps) {
            ++tries;
            Ctx ctx;
            ctx.tol = opts.tol;
            ctx.tol.branch *= step;
            ctx.seed = opts.seed;
            ctx.floor = 1e-14;
            try {
                Decomposition d = pullback(core(work, ctx), log);
                d.dims = t.dims();
                if (scale > 0.0)
                    for (SimpleTensor& s : d.terms)
                        for (Quaternion& q : s.a) q *= scale;
                d.residual = relative_error(t, densify(d));
                if (int(d.size()) <= out.bound && d.residual <= opts.tol.verify) {
                    out.decomposition = std::move(d);
                    out.path = ctx.path;
                    out.oplog_replayed = ctx.replayed || !log.empty();
                    out.attempts = tries;
                    return out;
                }
                last = std::to_string(d.size()) + " terms with residual " + std::to_string(d.residual);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::UnsupportedShape || e.kind() == ErrorKind::DimensionMismatch) throw;
                last = e.what();
            }
        }
    }
    throw Error(ErrorKind::AlgorithmFailure,
                dims_string(t.dims()) + ": no verified decomposition after " + std::to_string(tries) +
                    " attempts (last: " + last + ")");
}

DecomposeOutcome run_formula(const Tensor3& t, const DecomposeOptions& opts,
                             Decomposition (*formula)(const Tensor3&, const Ctx&), DecomposePath path) {
    Ctx ctx;
    ctx.tol = opts.tol;
    ctx.seed = opts.seed;
    DecomposeOutcome out;
    out.bound = shape_bound(t.dims());
    out.decomposition = formula(t, ctx);
    out.decomposition.residual = relative_error(t, densify(out.decomposition));
    out.path = path;
    if (out.decomposition.residual > opts.tol.verify)
        throw Error(ErrorKind::AlgorithmFailure,
                    "explicit formula residual " + std::to_string(out.decomposition.residual) + " above tolerance");
    return out;
}

}  // namespace

DecomposeOutcome decompose_222(const Tensor3& t, const DecomposeOptions& opts) {
    require_dims(t, {{2, 2, 2}}, "decompose_222");
    return run(t, opts, detail::core_any);
}

DecomposeOutcome decompose_223(const Tensor3& t, const DecomposeOptions& opts) {
    require_dims(t, {{2, 2, 3}, {3, 2, 2}}, "decompose_223");
    return run(t, opts, detail::core_any);
}

DecomposeOutcome decompose_232(const Tensor3& t, const DecomposeOptions& opts) {
    require_dims(t, {{2, 3, 2}}, "decompose_232");
    return run(t, opts, detail::core_any);
}

DecomposeOutcome decompose_232_complex(const Tensor3& t, const DecomposeOptions& opts) {
    return run_formula(t, opts, detail::core_232_complex, DecomposePath::P232Complex);
}

DecomposeOutcome decompose_233(const Tensor3& t, const DecomposeOptions& opts) {
    require_dims(t, {{2, 3, 3}, {3, 3, 2}}, "decompose_233");
    return run(t, opts, detail::core_any);
}

DecomposeOutcome decompose_323(const Tensor3& t, const DecomposeOptions& opts) {
    require_dims(t, {{3, 2, 3}}, "decompose_323");
    return run(t, opts, detail::core_any);
}

DecomposeOutcome decompose_333(const Tensor3& t, const DecomposeOptions& opts) {
    require_dims(t, {{3, 3, 3}}, "decompose_333");
    return run(t, opts, detail::core_any);
}

DecomposeOutcome decompose_333_complex_subcase(const Tensor3& t, const DecomposeOptions& opts) {
    return run_formula(t, opts, detail::core_333_complex, DecomposePath::P333Complex);
}

DecomposeOutcome dispatch(const Tensor3& t, const DecomposeOptions& opts) {
    shape_bound(t.dims());   // throws UnsupportedShape
    return run(t, opts, detail::core_any);
}

}  // namespace qtrank
