#include "qtrank/quaternion.hpp"

#include <algorithm>
#include <ostream>

#include "qtrank/error.hpp"

namespace qtrank {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DivisionByZero: return "DivisionByZero";
        case ErrorKind::Singular: return "Singular";
        case ErrorKind::NonSquare: return "NonSquare";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorKind::SearchBudgetExceeded: return "SearchBudgetExceeded";
        case ErrorKind::SolveBudgetExceeded: return "SolveBudgetExceeded";
        case ErrorKind::SingularOp: return "SingularOp";
        case ErrorKind::AlgorithmFailure: return "AlgorithmFailure";
        case ErrorKind::PreconditionViolated: return "PreconditionViolated";
        case ErrorKind::UnsupportedShape: return "UnsupportedShape";
        case ErrorKind::Parse: return "Parse";
    }
    return "Unknown";
}

Quaternion q_inv(const Quaternion& q, double pivot_tol) {
    const double n2 = q.norm2();
    if (n2 == 0.0 || std::sqrt(n2) <= pivot_tol)
        throw Error(ErrorKind::DivisionByZero, "quaternion inverse of a (near) zero element");
    return q.conj() / n2;
}

double max_abs_diff(const Quaternion& a, const Quaternion& b) {
    return std::max({std::abs(a.w - b.w), std::abs(a.x - b.x), std::abs(a.y - b.y),
                     std::abs(a.z - b.z)});
}

SimilarityClass similarity_class(const Quaternion& q) { return {q.w, q.imag().norm()}; }

bool similar(const Quaternion& p, const Quaternion& q, double tol) {
    const auto a = similarity_class(p);
    const auto b = similarity_class(q);
    const double scale = std::max({1.0, p.norm(), q.norm()});
    return std::abs(a.re - b.re) <= tol * scale && std::abs(a.imnorm - b.imnorm) <= tol * scale;
}

Quaternion complexifying_unit(const Quaternion& q) {
    const double im = q.imag().norm();
    if (im == 0.0) return Quaternion{1.0};
    const Quaternion u = q.imag() / im;
    // s i s^{-1} = u for s = (1 - u i)/|1 - u i|, degenerate only at u = -i.
    const Quaternion s = Quaternion{1.0} - u * Quaternion::i();
    const double sn = s.norm();
    if (sn < 1e-8) return Quaternion::j();
    return s / sn;
}

std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
    return os << '[' << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ']';
}

void left_mult_matrix(const Quaternion& a, double m[16]) {
    const double v[16] = {a.w, -a.x, -a.y, -a.z,
                          a.x, a.w,  -a.z, a.y,
                          a.y, a.z,  a.w,  -a.x,
                          a.z, -a.y, a.x,  a.w};
    std::copy(v, v + 16, m);
}

void right_mult_matrix(const Quaternion& a, double m[16]) {
    const double v[16] = {a.w, -a.x, -a.y, -a.z,
                          a.x, a.w,  a.z,  -a.y,
                          a.y, -a.z, a.w,  a.x,
                          a.z, a.y,  -a.x, a.w};
    std::copy(v, v + 16, m);
}

}  // namespace qtrank
