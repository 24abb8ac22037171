#pragma once

#include <cmath>
#include <complex>
#include <iosfwd>

namespace qtrank {

using Complex = std::complex<double>;

/// Real quaternion w + x i + y j + z k with i^2 = j^2 = k^2 = ijk = -1.
struct Quaternion {
    double w = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Quaternion() = default;
    constexpr Quaternion(double w_) : w(w_) {}
    constexpr Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    static constexpr Quaternion i() { return {0, 1, 0, 0}; }
    static constexpr Quaternion j() { return {0, 0, 1, 0}; }
    static constexpr Quaternion k() { return {0, 0, 0, 1}; }

    /// Embeds c = a + b i as a + b i + 0 j + 0 k.
    static constexpr Quaternion from_complex(Complex c) { return {c.real(), c.imag(), 0, 0}; }

    constexpr Quaternion conj() const { return {w, -x, -y, -z}; }
    constexpr double norm2() const { return w * w + x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }
    constexpr double real() const { return w; }
    constexpr Quaternion imag() const { return {0, x, y, z}; }
    bool is_zero() const { return w == 0 && x == 0 && y == 0 && z == 0; }
    bool is_complex(double tol = 0.0) const { return std::abs(y) <= tol && std::abs(z) <= tol; }

    constexpr Quaternion& operator+=(const Quaternion& o) {
        w += o.w; x += o.x; y += o.y; z += o.z;
        return *this;
    }
    constexpr Quaternion& operator-=(const Quaternion& o) {
        w -= o.w; x -= o.x; y -= o.y; z -= o.z;
        return *this;
    }
    constexpr Quaternion& operator*=(double s) {
        w *= s; x *= s; y *= s; z *= s;
        return *this;
    }
    Quaternion& operator*=(const Quaternion& o);

    friend constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
    friend constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
    friend constexpr Quaternion operator-(const Quaternion& a) { return {-a.w, -a.x, -a.y, -a.z}; }
    friend constexpr Quaternion operator*(Quaternion a, double s) { return a *= s; }
    friend constexpr Quaternion operator*(double s, Quaternion a) { return a *= s; }
    friend constexpr Quaternion operator/(Quaternion a, double s) { return a *= (1.0 / s); }

    /// Hamilton product.
    friend constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) {
        return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
                a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
                a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
                a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
    }

    friend constexpr bool operator==(const Quaternion& a, const Quaternion& b) {
        return a.w == b.w && a.x == b.x && a.y == b.y && a.z == b.z;
    }
};

inline Quaternion& Quaternion::operator*=(const Quaternion& o) { return *this = *this * o; }

/// Inverse conj(q)/|q|^2. Throws DivisionByZero when |q| <= pivot_tol.
Quaternion q_inv(const Quaternion& q, double pivot_tol = 0.0);

inline Quaternion q_mul(const Quaternion& a, const Quaternion& b) { return a * b; }

/// Largest componentwise difference.
double max_abs_diff(const Quaternion& a, const Quaternion& b);

/// q = c1 + c2 j with complex c1, c2.
struct ComplexPair {
    Complex c1;
    Complex c2;
};

constexpr ComplexPair to_pair(const Quaternion& q) { return {{q.w, q.x}, {q.y, q.z}}; }
constexpr Quaternion from_pair(const ComplexPair& p) {
    return {p.c1.real(), p.c1.imag(), p.c2.real(), p.c2.imag()};
}

/// Similarity invariants (Re q, |Im q|). p and q are similar iff these agree.
struct SimilarityClass {
    double re = 0.0;
    double imnorm = 0.0;
};

SimilarityClass similarity_class(const Quaternion& q);

/// Agreement of both invariants within tol (absolute plus relative).
bool similar(const Quaternion& p, const Quaternion& q, double tol = 1e-8);

/// Unit s with s^{-1} q s = Re q + |Im q| i, i.e. the complex representative of
/// the class of q with nonnegative imaginary part.
Quaternion complexifying_unit(const Quaternion& q);

std::ostream& operator<<(std::ostream& os, const Quaternion& q);

/// Real 4x4 matrices for q -> a*q (left) and q -> q*a (right), row-major in (w,x,y,z).
void left_mult_matrix(const Quaternion& a, double out[16]);
void right_mult_matrix(const Quaternion& a, double out[16]);

}  // namespace qtrank
