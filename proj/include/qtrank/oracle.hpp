#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qtrank/decompose.hpp"

namespace qtrank {

struct VerifyResult {
    double residual = 0.0;
    bool ok = false;
};

/// residual = max |T - densify(D)| / (1 + max |T|). Throws DimensionMismatch.
VerifyResult verify(const Tensor3& t, const Decomposition& d, double tol);

enum class Distribution { Uniform, Unit, Complex, Real };
const char* to_string(Distribution d);
/// "uniform" | "unit" | "complex" | "real"; throws Parse otherwise.
Distribution parse_distribution(const std::string& s);

/// Deterministic in (shape, seed, dist). Uniform draws each component from
/// [-1, 1]; Unit normalises a uniform draw; Complex and Real zero the j,k
/// (respectively i,j,k) parts of a uniform draw.
Tensor3 random_tensor(const Dims& shape, std::uint64_t seed, Distribution dist = Distribution::Uniform);

struct AlsResult {
    double residual = 0.0;          // best ||T - fit||_F / ||T||_F seen
    std::vector<double> objective;  // ||T - fit||_F^2 after each full sweep
    Decomposition fit;              // factors at the best sweep
};

/// Alternating least squares for an r-term fit. Each block update solves the
/// real 4x embedding by normal equations with ridge 1e-12.
AlsResult als_fit(const Tensor3& t, int r, int iters, std::uint64_t seed);

struct SuiteReport {
    Dims shape{0, 0, 0};
    int cases = 0;
    std::uint64_t master_seed = 0;
    double tol = 0.0;
    Distribution dist = Distribution::Uniform;
    int bound = 0;
    double max_residual = 0.0;
    int max_terms = 0;
    int retried = 0;   // cases that needed a preconditioned retry
    std::array<int, decompose_path_count> path_counts{};
    std::vector<std::uint64_t> failures;   // per-case seeds

    bool ok() const { return failures.empty(); }
    friend bool operator==(const SuiteReport&, const SuiteReport&) = default;
};

/// Seed of case `index` in a suite.
std::uint64_t case_seed(std::uint64_t master_seed, int index);

/// dispatch + verify on n_cases random tensors, cases spread over OpenMP threads.
/// Aggregation runs in case order, so the report does not depend on scheduling.
SuiteReport run_suite(const Dims& shape, int n_cases, std::uint64_t master_seed, double tol,
                      Distribution dist = Distribution::Uniform);
/// Single-threaded reference with identical results.
SuiteReport run_suite_serial(const Dims& shape, int n_cases, std::uint64_t master_seed, double tol,
                             Distribution dist = Distribution::Uniform);

}  // namespace qtrank
