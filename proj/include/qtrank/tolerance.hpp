#pragma once

namespace qtrank {

/// Numeric thresholds. Pivot, nullity and singularity thresholds are relative
/// to the scale (max entry norm) of the operand they are applied to.
struct Tolerances {
    double pivot = 1e-10;
    double solve = 1e-10;
    double cluster = 1e-7;
    double nullity = 1e-8;
    double eig = 1e-8;
    double sing = 1e-8;
    double diag = 1e-8;
    double similarity = 1e-8;
    double verify = 1e-7;
    /// Entries and singular values below branch * scale count as zero when an
    /// algorithm chooses between proof branches.
    double branch = 1e-9;
};

inline constexpr Tolerances default_tolerances{};

}  // namespace qtrank
