//! Deterministic d-dimensional geometry: points, subspaces, the convex hull
//! with its face lattice, LP membership, and the hull functionals.

mod hull;
mod lp;
mod ops;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::tolerances;

pub use hull::{convex_hull, f_vector, FVector, Facet, Hull, HullDocument};
pub use lp::{point_in_conv_lp, FeasibilityLp, LpOutcome};
pub use ops::{
    affine_intersects_hull, complement_power_integral, contains_point, haar_subspace,
    hull_volume, project_points, radial_function, simplex_volume, t_functional,
};

/// A point of `R^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    /// Panics on an empty or non-finite coordinate vector.
    pub fn new(coords: Vec<f64>) -> Self {
        Self::try_new(coords).expect("point must be non-empty with finite coordinates")
    }

    pub fn try_new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParams("non-finite coordinate".into()));
        }
        Ok(Self(coords))
    }

    pub fn origin(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.0)
    }

    pub fn dot(&self, other: &Point) -> f64 {
        linalg::dot(&self.0, &other.0)
    }

    pub fn scaled(&self, factor: f64) -> Point {
        Point(self.0.iter().map(|x| x * factor).collect())
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Point::new(coords)
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A `k`-dimensional linear subspace of `R^d` held by an orthonormal basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Point>,
}

impl Subspace {
    /// Orthonormalizes `spanning` and rejects rank-deficient input.
    pub fn from_spanning(ambient: usize, spanning: &[Point]) -> Result<Self> {
        for p in spanning {
            check_dim(p, ambient)?;
        }
        let raw: Vec<Vec<f64>> = spanning.iter().map(|p| p.coords().to_vec()).collect();
        let basis = linalg::orthonormalize(&raw, tolerances::DEGENERATE);
        if basis.len() != spanning.len() {
            return Err(Error::DegenerateAffineHull);
        }
        Ok(Self { ambient, basis: basis.into_iter().map(Point).collect() })
    }

    /// The whole space `R^d` with its standard basis.
    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut e = vec![0.0; ambient];
                e[i] = 1.0;
                Point(e)
            })
            .collect();
        Self { ambient, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Point] {
        &self.basis
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dot(b) - target).abs());
            }
        }
        worst
    }

    /// Coordinates of the orthogonal projection of `x` in this basis.
    pub fn coordinates(&self, x: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|q| linalg::dot(q.coords(), x)).collect()
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn complement(&self) -> Subspace {
        let mut all: Vec<Vec<f64>> = self.basis.iter().map(|p| p.coords().to_vec()).collect();
        let k = all.len();
        for i in 0..self.ambient {
            let mut e = vec![0.0; self.ambient];
            e[i] = 1.0;
            all.push(e);
        }
        let full = linalg::orthonormalize(&all, 1e-8);
        Subspace {
            ambient: self.ambient,
            basis: full.into_iter().skip(k).take(self.ambient - k).map(Point).collect(),
        }
    }
}

pub(crate) fn check_dim(p: &Point, d: usize) -> Result<()> {
    if p.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_spans_the_rest() {
        let s = Subspace::from_spanning(3, &[Point::new(vec![1.0, 1.0, 0.0])]).unwrap();
        let c = s.complement();
        assert_eq!(c.dim(), 2);
        for q in c.basis() {
            assert!(q.dot(&s.basis()[0]).abs() < 1e-12);
        }
        assert!(c.orthonormality_residual() < 1e-12);
    }

    #[test]
    fn rejects_non_finite_points() {
        assert!(Point::try_new(vec![f64::NAN]).is_err());
        assert!(Point::try_new(vec![]).is_err());
    }
}
