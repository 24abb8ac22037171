#include "qtrank/quadratic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <numbers>
#include <optional>
#include <random>

#include "qtrank/error.hpp"

namespace qtrank {

namespace {

Eigen::Vector4d as_vec(const Quaternion& q) { return {q.w, q.x, q.y, q.z}; }
Quaternion as_quat(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }

Eigen::Matrix4d left_of(const Quaternion& q) {
    double m[16];
    left_mult_matrix(q, m);
    return Eigen::Map<Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(m);
}

Eigen::Matrix4d right_of(const Quaternion& q) {
    double m[16];
    right_mult_matrix(q, m);
    return Eigen::Map<Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(m);
}

std::optional<Quaternion> newton(const Quaternion& alpha, const Quaternion& beta,
                                 const Quaternion& gamma, Quaternion x, double accept,
                                 int max_iterations) {
    const Eigen::Matrix4d la = left_of(alpha);
    const Eigen::Matrix4d rb = right_of(beta);
    for (int it = 0; it < max_iterations; ++it) {
        const Quaternion f = quadratic_residual(alpha, beta, gamma, x);
        if (f.norm() <= accept * 1e-3) return x;
        const Eigen::Matrix4d jac = left_of(x) + right_of(x) + la + rb;
        Eigen::FullPivLU<Eigen::Matrix4d> lu(jac);
        if (!lu.isInvertible()) return std::nullopt;
        const Eigen::Vector4d step = lu.solve(as_vec(f));
        x = as_quat(as_vec(x) - step);
        if (!std::isfinite(x.norm())) return std::nullopt;
    }
    if (quadratic_residual(alpha, beta, gamma, x).norm() <= accept) return x;
    return std::nullopt;
}

}  // namespace

Quaternion quadratic_residual(const Quaternion& alpha, const Quaternion& beta,
                              const Quaternion& gamma, const Quaternion& x) {
    return x * x + alpha * x + x * beta - gamma;
}

QuadraticRoot solve_quadratic(const Quaternion& alpha, const Quaternion& beta,
                              const Quaternion& gamma, const QuadraticOptions& opts) {
    const double scale = std::max({1.0, alpha.norm() + beta.norm(), std::sqrt(gamma.norm())});
    const double accept = opts.tol * scale * scale;

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::optional<QuadraticRoot> best;
    int converged = 0;
    for (int s = 0; s < opts.starts; ++s) {
        Quaternion x0;
        if (s < 8) {
            // complex-slice starts on a circle, alternating radius
            const double theta = 2.0 * std::numbers::pi * (s + 0.5) / 8.0;
            const double r = (s % 2 == 0 ? 1.0 : 0.5) * scale;
            x0 = {r * std::cos(theta), r * std::sin(theta), 0.0, 0.0};
        } else {
            x0 = Quaternion{gauss(rng), gauss(rng), gauss(rng), gauss(rng)} * scale;
        }
        auto root = newton(alpha, beta, gamma, x0, accept, opts.max_iterations);
        if (!root) continue;
        ++converged;
        const double res = quadratic_residual(alpha, beta, gamma, *root).norm();
        if (!best || std::abs(root->w) > std::abs(best->x.w) + opts.re_eps * scale) {
            best = QuadraticRoot{*root, res, 0};
        }
    }
    if (!best) throw Error(ErrorKind::SolveBudgetExceeded, "no quadratic root within restart budget");
    best->converged_starts = converged;
    return *best;
}

}  // namespace qtrank
