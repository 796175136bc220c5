//! Random cones over the half-sphere and convex hulls of power-law Poisson
//! processes: geometry, exact samplers, closed-form oracles, conic
//! functionals and Monte Carlo estimators.

pub mod closed_forms;
pub mod conic;
pub mod error;
pub mod functionals;
pub mod geometry;
pub mod linalg;
pub mod rng;
pub mod samplers;
pub mod stats;
pub mod tolerances;

pub use error::{Error, Result};
pub use geometry::{FVector, Hull, Point, Subspace};
pub use stats::Estimate;
