use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("input is not in general position: {0}")]
    DegenerateInput(String),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("facet with {0} vertices is not a simplex")]
    NonSimplicial(usize),
    #[error("origin is not in the interior of the hull")]
    OriginOutside,
    #[error("affine hull of the span points is rank deficient")]
    DegenerateAffineHull,
    #[error("point lies on the equator, gnomonic projection undefined")]
    PoleAtEquator,
    #[error("invalid radii: inner {r_in}, outer {r_out}")]
    InvalidRadii { r_in: f64, r_out: f64 },
    #[error("truncation not certified after {0} halvings")]
    TruncationFailure(usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("non-positive argument {0}")]
    NonPositiveArgument(f64),
    #[error("moment is infinite")]
    InfiniteMoment,
    #[error("active-set normal equations are singular")]
    IllConditioned,
    #[error("invalid k = {k} for dimension {d}")]
    InvalidK { k: usize, d: usize },
    #[error("importance weight overflow: point at norm {0} outside the hull")]
    WeightOverflow(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
