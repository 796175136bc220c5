//! Numerical thresholds shared by every module.

/// Slack for facet inequalities and other geometric predicates, relative to
/// the coordinate scale of the data (never below this absolute value).
pub const GEOMETRIC: f64 = 1e-9;

/// Orthonormality residual for subspace bases and unit normals.
pub const ORTHONORMAL: f64 = 1e-12;

/// Relative size below which a general-position determinant counts as zero.
pub const DEGENERATE: f64 = 1e-10;

/// Coefficient threshold for a generator to count as active in a cone projection.
pub const ACTIVE_COEFF: f64 = 1e-10;

/// Rank cut-off for pivoted QR, relative to the leading diagonal entry.
pub const RANK: f64 = 1e-8;

/// Allowed KKT residual of the nonnegative least-squares solution.
pub const KKT: f64 = 1e-9;

/// Feasibility tolerance of the simplex method on normalized data.
pub const LP_FEASIBILITY: f64 = 1e-9;

/// Target absolute error for adaptive Gauss-Legendre quadrature.
pub const QUADRATURE: f64 = 1e-12;

/// Smallest first coordinate accepted by the gnomonic projection.
pub const EQUATOR: f64 = 1e-300;

/// z-score bound for statistical rows in reports.
pub const Z_PASS: f64 = 4.0;

/// Significance level for goodness-of-fit tests.
pub const SIGNIFICANCE: f64 = 0.01;

/// Scale-aware slack: `GEOMETRIC * max(1, scale)`.
#[inline]
pub fn geometric(scale: f64) -> f64 {
    GEOMETRIC * scale.max(1.0)
}
