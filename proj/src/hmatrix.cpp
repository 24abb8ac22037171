#include "qtrank/hmatrix.hpp"

#include <algorithm>
#include <cmath>

#include "qtrank/error.hpp"

namespace qtrank {

HMatrix::HMatrix(std::initializer_list<std::initializer_list<Quaternion>> rows) {
    rows_ = int(rows.size());
    cols_ = rows_ == 0 ? 0 : int(rows.begin()->size());
    data_.reserve(std::size_t(rows_) * cols_);
    for (const auto& r : rows) {
        if (int(r.size()) != cols_) throw Error(ErrorKind::DimensionMismatch, "ragged matrix literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

HMatrix HMatrix::identity(int n) {
    HMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

HMatrix HMatrix::diagonal(std::span<const Quaternion> d) {
    HMatrix m(int(d.size()), int(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(int(i), int(i)) = d[i];
    return m;
}

HMatrix HMatrix::from_column(std::span<const Quaternion> v) {
    HMatrix m(int(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(int(i), 0) = v[i];
    return m;
}

HMatrix HMatrix::from_row(std::span<const Quaternion> v) {
    HMatrix m(1, int(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) m(0, int(i)) = v[i];
    return m;
}

HVector HMatrix::column(int c) const {
    HVector v(rows_);
    for (int r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

HVector HMatrix::row(int r) const {
    return HVector(data_.begin() + std::ptrdiff_t(r) * cols_,
                   data_.begin() + std::ptrdiff_t(r + 1) * cols_);
}

void HMatrix::set_column(int c, std::span<const Quaternion> v) {
    for (int r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

HMatrix HMatrix::adjoint() const {
    HMatrix m(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c).conj();
    return m;
}

HMatrix HMatrix::transpose() const {
    HMatrix m(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
    return m;
}

double HMatrix::max_norm() const {
    double m = 0.0;
    for (const auto& q : data_) m = std::max(m, q.norm());
    return m;
}

bool HMatrix::is_complex(double tol) const {
    return std::all_of(data_.begin(), data_.end(), [tol](const Quaternion& q) { return q.is_complex(tol); });
}

bool HMatrix::is_real(double tol) const {
    return std::all_of(data_.begin(), data_.end(), [tol](const Quaternion& q) {
        return std::abs(q.x) <= tol && q.is_complex(tol);
    });
}

HMatrix& HMatrix::operator+=(const HMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorKind::DimensionMismatch, "matrix sum");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

HMatrix& HMatrix::operator-=(const HMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorKind::DimensionMismatch, "matrix difference");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

HMatrix operator*(const HMatrix& a, const HMatrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorKind::DimensionMismatch, "matrix product");
    HMatrix m(a.rows_, b.cols_);
    for (int r = 0; r < a.rows_; ++r)
        for (int c = 0; c < b.cols_; ++c) {
            Quaternion s;
            for (int t = 0; t < a.cols_; ++t) s += a(r, t) * b(t, c);
            m(r, c) = s;
        }
    return m;
}

HMatrix operator*(const Quaternion& s, const HMatrix& a) {
    HMatrix m = a;
    for (auto& q : m.data_) q = s * q;
    return m;
}

HMatrix operator*(const HMatrix& a, const Quaternion& s) {
    HMatrix m = a;
    for (auto& q : m.data_) q = q * s;
    return m;
}

HVector operator*(const HMatrix& a, std::span<const Quaternion> v) {
    if (int(v.size()) != a.cols_) throw Error(ErrorKind::DimensionMismatch, "matrix-vector product");
    HVector out(a.rows_);
    for (int r = 0; r < a.rows_; ++r)
        for (int c = 0; c < a.cols_; ++c) out[r] += a(r, c) * v[c];
    return out;
}

double max_abs_diff(const HMatrix& a, const HMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(ErrorKind::DimensionMismatch, "max_abs_diff shapes");
    double m = 0.0;
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) m = std::max(m, max_abs_diff(a(r, c), b(r, c)));
    return m;
}

namespace {

// chi for rectangular matrices; the public entry point insists on square input
CMatrix chi_any(const HMatrix& a) {
    const int m = a.rows(), n = a.cols();
    CMatrix chi(2 * m, 2 * n);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c) {
            const auto [a1, a2] = to_pair(a(r, c));
            chi(r, c) = a1;
            chi(r, n + c) = a2;
            chi(m + r, c) = -std::conj(a2);
            chi(m + r, n + c) = std::conj(a1);
        }
    return chi;
}

}  // namespace

CMatrix chi_adjoint(const HMatrix& a) {
    if (!a.square()) throw Error(ErrorKind::NonSquare, "complex adjoint needs a square matrix");
    return chi_any(a);
}

HVector to_quaternion_vector(const CVector& z) {
    const auto n = z.size() / 2;
    HVector v(n);
    for (Eigen::Index r = 0; r < n; ++r)
        v[r] = from_pair({z[r], -std::conj(z[n + r])});
    return v;
}

CVector to_complex_vector(std::span<const Quaternion> v) {
    const auto n = Eigen::Index(v.size());
    CVector z(2 * n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto [c1, c2] = to_pair(v[r]);
        z[r] = c1;
        z[n + r] = -std::conj(c2);
    }
    return z;
}

int h_rank(const HMatrix& a, double rel_tol) {
    HMatrix m = a;
    const double thresh = rel_tol * m.max_norm();
    if (m.max_norm() == 0.0) return 0;
    int rank = 0;
    std::vector<bool> row_used(m.rows(), false), col_used(m.cols(), false);
    while (rank < std::min(m.rows(), m.cols())) {
        int pr = -1, pc = -1;
        double best = thresh;
        for (int r = 0; r < m.rows(); ++r) {
            if (row_used[r]) continue;
            for (int c = 0; c < m.cols(); ++c) {
                if (col_used[c]) continue;
                if (m(r, c).norm() > best) best = m(r, c).norm(), pr = r, pc = c;
            }
        }
        if (pr < 0) break;
        const Quaternion pinv = q_inv(m(pr, pc));
        for (int r = 0; r < m.rows(); ++r) {
            if (row_used[r] || r == pr) continue;
            const Quaternion f = m(r, pc) * pinv;
            for (int c = 0; c < m.cols(); ++c) m(r, c) -= f * m(pr, c);
        }
        row_used[pr] = true;
        col_used[pc] = true;
        ++rank;
    }
    return rank;
}

HMatrix h_inverse(const HMatrix& a, double rel_tol) {
    if (!a.square()) throw Error(ErrorKind::NonSquare, "inverse of a non-square matrix");
    const int n = a.rows();
    HMatrix m = a, inv = HMatrix::identity(n);
    const double thresh = rel_tol * a.max_norm();
    for (int c = 0; c < n; ++c) {
        int pr = c;
        for (int r = c + 1; r < n; ++r)
            if (m(r, c).norm() > m(pr, c).norm()) pr = r;
        if (m(pr, c).norm() <= thresh || m(pr, c).is_zero())
            throw Error(ErrorKind::Singular, "matrix is singular to working precision");
        if (pr != c)
            for (int t = 0; t < n; ++t) {
                std::swap(m(pr, t), m(c, t));
                std::swap(inv(pr, t), inv(c, t));
            }
        const Quaternion pinv = q_inv(m(c, c));
        for (int t = 0; t < n; ++t) {
            m(c, t) = pinv * m(c, t);
            inv(c, t) = pinv * inv(c, t);
        }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const Quaternion f = m(r, c);
            if (f.is_zero()) continue;
            for (int t = 0; t < n; ++t) {
                m(r, t) -= f * m(c, t);
                inv(r, t) -= f * inv(c, t);
            }
        }
    }
    return inv;
}

double sigma_min(const HMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(chi_any(a));
    return svd.singularValues().minCoeff();
}

double inverse_condition(const HMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(chi_any(a));
    const auto& s = svd.singularValues();
    if (s[0] == 0.0) return 0.0;
    return s[s.size() - 1] / s[0];
}

HVector right_null_vector(const HMatrix& a) {
    Eigen::JacobiSVD<CMatrix> svd(chi_any(a), Eigen::ComputeFullV);
    const CVector z = svd.matrixV().col(svd.matrixV().cols() - 1);
    HVector v = to_quaternion_vector(z);
    double n2 = 0.0;
    for (const auto& q : v) n2 += q.norm2();
    for (auto& q : v) q = q / std::sqrt(n2);
    return v;
}

HVector left_null_vector(const HMatrix& a) {
    HVector v = right_null_vector(a.adjoint());
    for (auto& q : v) q = q.conj();
    return v;
}

std::vector<std::pair<HVector, HVector>> rank_factorization(const HMatrix& a, double rel_tol) {
    std::vector<std::pair<HVector, HVector>> terms;
    HMatrix m = a;
    const double thresh = rel_tol * a.max_norm();
    if (a.max_norm() == 0.0) return terms;
    for (int step = 0; step < std::min(a.rows(), a.cols()); ++step) {
        int pr = -1, pc = -1;
        double best = thresh;
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c)
                if (m(r, c).norm() > best) best = m(r, c).norm(), pr = r, pc = c;
        if (pr < 0) break;
        // p = column pc, q = pivot^{-1} * row pr; p q^T reproduces row pr and column pc
        HVector p = m.column(pc);
        HVector q = m.row(pr);
        const Quaternion pinv = q_inv(m(pr, pc));
        for (auto& e : q) e = pinv * e;
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) m(r, c) -= p[r] * q[c];
        for (int c = 0; c < m.cols(); ++c) m(pr, c) = Quaternion{};
        for (int r = 0; r < m.rows(); ++r) m(r, pc) = Quaternion{};
        terms.emplace_back(std::move(p), std::move(q));
    }
    return terms;
}

HVector h_solve(const HMatrix& a, std::span<const Quaternion> b, double rel_tol) {
    return h_inverse(a, rel_tol) * b;
}

}  // namespace qtrank
