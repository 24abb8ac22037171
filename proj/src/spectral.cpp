#include "qtrank/spectral.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <random>

#include "qtrank/error.hpp"

namespace qtrank {

namespace {

double max_entry(const CMatrix& c) { return c.size() == 0 ? 0.0 : c.cwiseAbs().maxCoeff(); }

bool complex_less(const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

// columns of V spanning the numerical null space of m (threshold absolute)
CMatrix null_basis(const CMatrix& m, double thresh) {
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int nullity = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] <= thresh) ++nullity;
    const auto cols = svd.matrixV().cols();
    return svd.matrixV().rightCols(nullity + (cols - s.size()));
}

CVector smallest_right_singular(const CMatrix& m) {
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
    return svd.matrixV().col(svd.matrixV().cols() - 1);
}

double hnorm(std::span<const Quaternion> v) {
    double s = 0.0;
    for (const auto& q : v) s += q.norm2();
    return std::sqrt(s);
}

// <u, v> = sum conj(u_i) v_i
Quaternion hdot(std::span<const Quaternion> u, std::span<const Quaternion> v) {
    Quaternion s;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i].conj() * v[i];
    return s;
}

// v minus its projection on the orthonormal set; returns the remainder
HVector orthogonal_remainder(const std::vector<HVector>& basis, HVector v) {
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : basis) {
            const Quaternion c = hdot(q, v);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= q[i] * c;
        }
    return v;
}

// unitary matrix whose first column is the unit vector v
HMatrix complete_unitary(const HVector& v) {
    const int n = int(v.size());
    std::vector<HVector> basis{v};
    for (int e = 0; e < n && int(basis.size()) < n; ++e) {
        HVector cand(n);
        cand[e] = 1.0;
        HVector r = orthogonal_remainder(basis, cand);
        const double nr = hnorm(r);
        if (nr < 1e-3) continue;
        for (auto& q : r) q = q / nr;
        basis.push_back(std::move(r));
    }
    // pick the best-conditioned completions first; a second sweep covers degenerate picks
    HMatrix u(n, n);
    for (int c = 0; c < n; ++c) u.set_column(c, basis[c]);
    return u;
}

HMatrix embed_block(const HMatrix& w, int n) {
    const int k = n - w.rows();
    HMatrix out = HMatrix::identity(n);
    for (int r = 0; r < w.rows(); ++r)
        for (int c = 0; c < w.cols(); ++c) out(k + r, k + c) = w(r, c);
    return out;
}

HMatrix block(const HMatrix& a, int k) {
    const int m = a.rows() - k;
    HMatrix out(m, m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) out(r, c) = a(k + r, k + c);
    return out;
}

double off_diagonal(const HMatrix& d) {
    double off = 0.0;
    for (int r = 0; r < d.rows(); ++r)
        for (int c = 0; c < d.cols(); ++c)
            if (r != c) off = std::max(off, d(r, c).norm());
    return off;
}

}  // namespace

EigenReport complex_eigen(const CMatrix& c, const Tolerances& tol) {
    if (c.rows() != c.cols()) throw Error(ErrorKind::NonSquare, "complex_eigen needs a square matrix");
    EigenReport report;
    const auto n = c.rows();
    if (n == 0) {
        report.diagonalizable = true;
        report.basis = CMatrix(0, 0);
        return report;
    }
    Eigen::ComplexEigenSolver<CMatrix> es(c, false);
    if (es.info() != Eigen::Success)
        throw Error(ErrorKind::ConvergenceFailure, "complex eigensolver did not converge");
    std::vector<Complex> vals(es.eigenvalues().data(), es.eigenvalues().data() + n);

    const double scale = max_entry(c);
    const double gap = tol.cluster * std::max(scale, 1e-300);

    // single-linkage clustering
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (std::abs(vals[a] - vals[b]) <= gap) parent[find(a)] = find(b);

    std::vector<std::vector<Complex>> groups;
    std::vector<int> group_of(n, -1);
    for (int a = 0; a < n; ++a) {
        const int root = find(a);
        if (group_of[root] < 0) {
            group_of[root] = int(groups.size());
            groups.emplace_back();
        }
        groups[group_of[root]].push_back(vals[a]);
    }
    for (const auto& g : groups) {
        Complex mean = std::accumulate(g.begin(), g.end(), Complex{}) / double(g.size());
        report.clusters.push_back({mean, int(g.size()), 0});
    }
    std::sort(report.clusters.begin(), report.clusters.end(),
              [](const EigenCluster& a, const EigenCluster& b) { return complex_less(a.value, b.value); });
    for (const auto& cl : report.clusters)
        for (const auto& g : groups) {
            const Complex mean = std::accumulate(g.begin(), g.end(), Complex{}) / double(g.size());
            if (mean == cl.value) {
                auto sorted = g;
                std::sort(sorted.begin(), sorted.end(), complex_less);
                report.eigenvalues.insert(report.eigenvalues.end(), sorted.begin(), sorted.end());
                break;
            }
        }

    const double null_thresh = tol.nullity * std::max(scale, 1e-300);
    const CMatrix id = CMatrix::Identity(n, n);
    report.diagonalizable = true;
    CMatrix basis(n, n);
    Eigen::Index filled = 0;
    for (auto& cl : report.clusters) {
        const CMatrix nb = null_basis(c - cl.value * id, null_thresh);
        cl.geometric = std::min<int>(int(nb.cols()), cl.algebraic);
        if (cl.geometric != cl.algebraic) report.diagonalizable = false;
        if (report.diagonalizable) {
            basis.middleCols(filled, cl.geometric) = nb.leftCols(cl.geometric);
            filled += cl.geometric;
        }
    }
    if (report.diagonalizable) report.basis = basis;
    return report;
}

DiagonalizabilityReport is_diagonalizable(const HMatrix& a, const Tolerances& tol) {
    auto report = complex_eigen(chi_adjoint(a), tol);
    const bool flag = report.diagonalizable;
    return {flag, std::move(report)};
}

std::optional<Diagonalization> diagonalize(const HMatrix& a, const Tolerances& tol) {
    const int n = a.rows();
    const CMatrix chi = chi_adjoint(a);
    const EigenReport report = complex_eigen(chi, tol);
    if (!report.diagonalizable) return std::nullopt;

    const double scale = std::max(a.max_norm(), 1e-300);
    const double null_thresh = tol.nullity * max_entry(chi);
    const CMatrix id = CMatrix::Identity(2 * n, 2 * n);

    std::vector<HVector> chosen, ortho;
    for (const auto& cl : report.clusters) {
        if (cl.value.imag() < -tol.cluster * scale) continue;   // conjugate partner of an upper cluster
        const CMatrix nb = null_basis(chi - cl.value * id, std::max(null_thresh, 1e-300));
        for (Eigen::Index col = 0; col < nb.cols() && int(chosen.size()) < n; ++col) {
            HVector v = to_quaternion_vector(nb.col(col));
            const double nv = hnorm(v);
            if (nv == 0.0) continue;
            for (auto& q : v) q = q / nv;
            HVector r = orthogonal_remainder(ortho, v);
            const double nr = hnorm(r);
            if (nr < 1e-6) continue;
            for (auto& q : r) q = q / nr;
            ortho.push_back(std::move(r));
            chosen.push_back(std::move(v));
        }
    }
    if (int(chosen.size()) < n) return std::nullopt;

    Diagonalization out;
    out.p = HMatrix(n, n);
    for (int c = 0; c < n; ++c) out.p.set_column(c, chosen[c]);
    HMatrix pinv;
    try {
        pinv = h_inverse(out.p);
    } catch (const Error&) {
        return std::nullopt;
    }
    const HMatrix d = pinv * a * out.p;
    out.off_diagonal = off_diagonal(d);
    out.diagonal.resize(n);
    for (int i = 0; i < n; ++i) out.diagonal[i] = d(i, i);
    const double ic = inverse_condition(out.p);
    out.condition = ic > 0.0 ? 1.0 / ic : std::numeric_limits<double>::infinity();
    if (out.off_diagonal > tol.diag * scale) return std::nullopt;
    return out;
}

RightEigenpair right_eigenpair(const HMatrix& a) {
    const CMatrix chi = chi_adjoint(a);
    Eigen::ComplexEigenSolver<CMatrix> es(chi, false);
    if (es.info() != Eigen::Success)
        throw Error(ErrorKind::ConvergenceFailure, "complex eigensolver did not converge");
    // largest imaginary part, ties by real part: deterministic and always Im >= 0
    Complex lambda = es.eigenvalues()[0];
    for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i) {
        const Complex e = es.eigenvalues()[i];
        if (e.imag() > lambda.imag() || (e.imag() == lambda.imag() && e.real() > lambda.real())) lambda = e;
    }
    if (lambda.imag() < 0) lambda = std::conj(lambda);
    const CMatrix shifted = chi - lambda * CMatrix::Identity(chi.rows(), chi.cols());
    HVector v = to_quaternion_vector(smallest_right_singular(shifted));
    const double nv = hnorm(v);
    for (auto& q : v) q = q / nv;
    const HVector av = a * std::span<const Quaternion>(v);
    double res = 0.0;
    const Quaternion lq = Quaternion::from_complex(lambda);
    for (std::size_t i = 0; i < v.size(); ++i) res += (av[i] - v[i] * lq).norm2();
    return {std::move(v), lambda, std::sqrt(res)};
}

SchurForm schur_triangularize(const HMatrix& a) {
    if (!a.square()) throw Error(ErrorKind::NonSquare, "Schur form needs a square matrix");
    const int n = a.rows();
    HMatrix u = HMatrix::identity(n);
    HMatrix t = a;
    for (int k = 0; k + 1 < n; ++k) {
        const RightEigenpair pair = right_eigenpair(block(t, k));
        const HMatrix w = embed_block(complete_unitary(pair.v), n);
        t = w.adjoint() * t * w;
        u = u * w;
    }
    HVector s(n);
    for (int d = 0; d < n; ++d) s[d] = complexifying_unit(t(d, d));
    const HMatrix sm = HMatrix::diagonal(s);
    t = sm.adjoint() * t * sm;
    u = u * sm;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < r; ++c) t(r, c) = Quaternion{};
        t(r, r).y = 0.0;
        t(r, r).z = 0.0;
        t(r, r).x = std::abs(t(r, r).x);
    }
    return {std::move(u), std::move(t)};
}

SimDiagResult simultaneous_diagonalize(const std::vector<HMatrix>& ms, std::uint64_t seed,
                                       const Tolerances& tol) {
    SimDiagResult out;
    if (ms.empty()) {
        out.p = HMatrix(0, 0);
        return out;
    }
    const int n = ms.front().rows();
    for (const auto& m : ms)
        if (!m.square() || m.rows() != n)
            throw Error(ErrorKind::DimensionMismatch, "simultaneous_diagonalize family shapes differ");

    auto diagonal_under = [&](const HMatrix& p, const HMatrix& pinv) {
        for (const auto& m : ms) {
            const double scale = std::max(m.max_norm(), 1e-300);
            if (off_diagonal(pinv * m * p) > tol.diag * scale) return false;
        }
        return true;
    };

    const HMatrix id = HMatrix::identity(n);
    if (diagonal_under(id, id)) {
        out.p = id;
        return out;
    }
    for (const auto& m : ms)
        if (!is_diagonalizable(m, tol).diagonalizable) return out;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int attempt = 0; attempt < 8; ++attempt) {
        ++out.attempts;
        HMatrix combo(n, n);
        for (const auto& m : ms) {
            const double c = gauss(rng);
            combo += Quaternion{c} * m;
        }
        const auto diag = diagonalize(combo, tol);
        if (!diag) continue;
        HMatrix pinv;
        try {
            pinv = h_inverse(diag->p);
        } catch (const Error&) {
            continue;
        }
        if (diagonal_under(diag->p, pinv)) {
            out.p = diag->p;
            return out;
        }
    }
    return out;
}

namespace {

struct NewtonOutcome {
    Quaternion x;
    double sigma;
};

double sigma_shifted(const HMatrix& m, const Quaternion& x) {
    HMatrix s = m;
    for (int i = 0; i < m.rows(); ++i) s(i, i) += x;
    return sigma_min(s);
}

Eigen::Matrix4d left4(const Quaternion& q) {
    double v[16];
    left_mult_matrix(q, v);
    return Eigen::Map<Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(v);
}

Eigen::Matrix4d right4(const Quaternion& q) {
    double v[16];
    right_mult_matrix(q, v);
    return Eigen::Map<Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(v);
}

// Newton on (x I + M) u = 0 with one component of u pinned to 1.
NewtonOutcome polish_left_eigen(const HMatrix& m, Quaternion x) {
    const int n = m.rows();
    HMatrix shifted = m;
    for (int i = 0; i < n; ++i) shifted(i, i) += x;
    HVector u = right_null_vector(shifted);
    int pin = 0;
    for (int i = 1; i < n; ++i)
        if (u[i].norm() > u[pin].norm()) pin = i;
    const Quaternion upin_inv = q_inv(u[pin]);
    for (auto& q : u) q = q * upin_inv;

    NewtonOutcome best{x, sigma_shifted(m, x)};
    for (int it = 0; it < 30; ++it) {
        Eigen::VectorXd f(4 * n);
        for (int i = 0; i < n; ++i) {
            Quaternion r = x * u[i];
            for (int k = 0; k < n; ++k) r += m(i, k) * u[k];
            f.segment<4>(4 * i) << r.w, r.x, r.y, r.z;
        }
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(4 * n, 4 * n);
        for (int i = 0; i < n; ++i) {
            jac.block<4, 4>(4 * i, 0) = right4(u[i]);
            int col = 1;
            for (int k = 0; k < n; ++k) {
                if (k == pin) continue;
                Eigen::Matrix4d blk = left4(m(i, k));
                if (i == k) blk += left4(x);
                jac.block<4, 4>(4 * i, 4 * col) = blk;
                ++col;
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (!lu.isInvertible()) break;
        const Eigen::VectorXd step = lu.solve(f);
        x -= Quaternion{step[0], step[1], step[2], step[3]};
        int col = 1;
        for (int k = 0; k < n; ++k) {
            if (k == pin) continue;
            u[k] -= Quaternion{step[4 * col], step[4 * col + 1], step[4 * col + 2], step[4 * col + 3]};
            ++col;
        }
        if (!std::isfinite(x.norm())) break;
        const double s = sigma_shifted(m, x);
        if (s < best.sigma) best = {x, s};
        if (step.norm() < 1e-15 * std::max(1.0, x.norm())) break;
    }
    return best;
}

// Nelder-Mead over R^4
Quaternion simplex_minimize(const HMatrix& m, Quaternion start, double step, int iterations) {
    using P = std::array<double, 4>;
    auto f = [&](const P& p) { return sigma_shifted(m, Quaternion{p[0], p[1], p[2], p[3]}); };
    std::array<P, 5> pts;
    std::array<double, 5> vals;
    pts[0] = {start.w, start.x, start.y, start.z};
    for (int i = 0; i < 4; ++i) {
        pts[i + 1] = pts[0];
        pts[i + 1][i] += step;
    }
    for (int i = 0; i < 5; ++i) vals[i] = f(pts[i]);
    for (int it = 0; it < iterations; ++it) {
        std::array<int, 5> order{0, 1, 2, 3, 4};
        std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        std::array<P, 5> sp;
        std::array<double, 5> sv;
        for (int i = 0; i < 5; ++i) sp[i] = pts[order[i]], sv[i] = vals[order[i]];
        pts = sp;
        vals = sv;
        P centroid{};
        for (int i = 0; i < 4; ++i)
            for (int d = 0; d < 4; ++d) centroid[d] += pts[i][d] / 4.0;
        auto lerp = [&](double t) {
            P p;
            for (int d = 0; d < 4; ++d) p[d] = centroid[d] + t * (pts[4][d] - centroid[d]);
            return p;
        };
        const P refl = lerp(-1.0);
        const double fr = f(refl);
        if (fr < vals[0]) {
            const P exp = lerp(-2.0);
            const double fe = f(exp);
            if (fe < fr) pts[4] = exp, vals[4] = fe;
            else pts[4] = refl, vals[4] = fr;
        } else if (fr < vals[3]) {
            pts[4] = refl, vals[4] = fr;
        } else {
            const P con = lerp(fr < vals[4] ? -0.5 : 0.5);
            const double fc = f(con);
            if (fc < std::min(fr, vals[4])) {
                pts[4] = con, vals[4] = fc;
            } else {
                for (int i = 1; i < 5; ++i) {
                    for (int d = 0; d < 4; ++d) pts[i][d] = pts[0][d] + 0.5 * (pts[i][d] - pts[0][d]);
                    vals[i] = f(pts[i]);
                }
            }
        }
    }
    const auto best = std::min_element(vals.begin(), vals.end()) - vals.begin();
    return {pts[best][0], pts[best][1], pts[best][2], pts[best][3]};
}

}  // namespace

LeftEigenResult left_eigen_search(const HMatrix& m, const LeftEigenOptions& opts, const Tolerances& tol) {
    if (!m.square()) throw Error(ErrorKind::NonSquare, "left_eigen_search needs a square matrix");
    const int n = m.rows();
    const double scale = std::max(m.max_norm(), 1e-300);
    const double accept = tol.sing * scale;

    std::vector<Quaternion> seeds;
    if (m.is_complex(1e-14 * scale)) {
        CMatrix c(n, n);
        for (int r = 0; r < n; ++r)
            for (int k = 0; k < n; ++k) c(r, k) = Complex(m(r, k).w, m(r, k).x);
        Eigen::ComplexEigenSolver<CMatrix> es(c, false);
        if (es.info() == Eigen::Success)
            for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
                seeds.push_back(-Quaternion::from_complex(es.eigenvalues()[i]));
        for (const auto& s : seeds) {
            const double sig = sigma_shifted(m, s);
            if (sig <= accept) return {s, sig};
        }
    }
    {
        Eigen::ComplexEigenSolver<CMatrix> es(chi_adjoint(m), false);
        if (es.info() == Eigen::Success)
            for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
                seeds.push_back(-Quaternion::from_complex(es.eigenvalues()[i]));
    }
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (int(seeds.size()) < opts.starts)
        seeds.push_back(Quaternion{gauss(rng), gauss(rng), gauss(rng), gauss(rng)} * scale);

    LeftEigenResult best{Quaternion{}, std::numeric_limits<double>::infinity()};
    for (const auto& s : seeds) {
        NewtonOutcome direct = polish_left_eigen(m, s);
        if (direct.sigma <= accept) return {direct.x, direct.sigma};
        const Quaternion nm = simplex_minimize(m, s, 0.5 * scale, opts.simplex_iterations);
        NewtonOutcome refined = polish_left_eigen(m, nm);
        if (refined.sigma <= accept) return {refined.x, refined.sigma};
        if (refined.sigma < best.sigma) best = {refined.x, refined.sigma};
    }
    throw Error(ErrorKind::SearchBudgetExceeded, "no left eigenvalue found within start budget");
}

}  // namespace qtrank
