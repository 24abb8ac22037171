#pragma once
#include <random>

#include "qtrank/hmatrix.hpp"
#include "qtrank/tensor.hpp"

namespace qtest {

using namespace qtrank;

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double lo = -1.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }
    Quaternion quat() { return {uniform(), uniform(), uniform(), uniform()}; }
    Quaternion complex() { return {uniform(), uniform(), 0.0, 0.0}; }
    Quaternion pure() { return {0.0, uniform(), uniform(), uniform()}; }
    HMatrix matrix(int r, int c) {
        HMatrix m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m(i, j) = quat();
        return m;
    }
    HVector vec(int n) {
        HVector v(n);
        for (auto& q : v) q = quat();
        return v;
    }
    Tensor3 tensor(const Dims& d) {
        Tensor3 t(d);
        for (int i = 0; i < d[0]; ++i)
            for (int j = 0; j < d[1]; ++j)
                for (int k = 0; k < d[2]; ++k) t(i, j, k) = quat();
        return t;
    }
    Tensor3 complex_tensor(const Dims& d) {
        Tensor3 t(d);
        for (int i = 0; i < d[0]; ++i)
            for (int j = 0; j < d[1]; ++j)
                for (int k = 0; k < d[2]; ++k) t(i, j, k) = complex();
        return t;
    }
};

inline double qdiff(const Quaternion& a, const Quaternion& b) { return (a - b).norm(); }

inline HMatrix mat2(Quaternion a, Quaternion b, Quaternion c, Quaternion d) {
    return HMatrix{{a, b}, {c, d}};
}

inline HMatrix e_matrix(int n, std::initializer_list<std::pair<int, int>> ones) {
    HMatrix m(n, n);
    for (auto [r, c] : ones) m(r, c) = 1.0;
    return m;
}

/// (I_2; [[0,1],[0,0]]) as a 2x2x2 tensor.
inline Tensor3 witness_222() {
    return Tensor3::from_frontal({HMatrix::identity(2), mat2(0, 1, 0, 0)});
}

/// (I_3; E13 + E22) as a 3x2x3 tensor.
inline Tensor3 witness_323() {
    return Tensor3::from_frontal({HMatrix::identity(3), e_matrix(3, {{0, 2}, {1, 1}})});
}

/// The quaternion 2x2x3 example with frontal slices
/// [[1,i,0],[0,-j,1+i]] and [[0,1+j,0],[0,i+k,1+j]].
inline Tensor3 example_223() {
    const Quaternion i = Quaternion::i(), j = Quaternion::j(), k = Quaternion::k();
    HMatrix a{{1, i, 0}, {0, -j, 1 + i}};
    HMatrix b{{0, 1 + j, 0}, {0, i + k, 1 + j}};
    return Tensor3::from_frontal({a, b});
}

/// Column ops of that example, as mode-3 right multiplications.
inline HMatrix example_223_op(int step) {
    const Quaternion i = Quaternion::i(), j = Quaternion::j(), k = Quaternion::k();
    HMatrix r = HMatrix::identity(3);
    if (step == 0) {
        r(1, 1) = j;                        // C2 -> C2 j
    } else if (step == 1) {
        r(0, 2) = j + k;                    // C3 -> C3 - C2(1+i) + C1(j+k)
        r(1, 2) = -(1 + i);
    } else {
        r(1, 1) = 3;                        // C2 -> 3 C2 - C3(-2+i-k)
        r(2, 1) = 2 - i + k;
    }
    return r;
}

inline Tensor3 example_223_stage(int step) {
    const Quaternion i = Quaternion::i(), j = Quaternion::j(), k = Quaternion::k();
    switch (step) {
        case 0:
            return Tensor3::from_frontal({HMatrix{{1, k, 0}, {0, 1, 1 + i}},
                                          HMatrix{{0, -1 + j, 0}, {0, -i + k, 1 + j}}});
        case 1:
            return Tensor3::from_frontal({HMatrix{{1, k, 0}, {0, 1, 0}},
                                          HMatrix{{0, -1 + j, 1 + i - j + k}, {0, -i + k, i - k}}});
        default:
            return Tensor3::from_frontal({HMatrix{{1, 3 * k, 0}, {0, 3, 0}},
                                          HMatrix{{0, -1 - j + 2 * k, 1 + i - j + k}, {0, 2 - i + k, i - k}}});
    }
}

}  // namespace qtest
