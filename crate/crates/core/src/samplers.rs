//! Exact samplers: uniform points on the upper half-sphere, their gnomonic
//! images, power-law Poisson processes with a certified truncation radius,
//! and random cones.

use rand::Rng;
use rand_distr::{Distribution, Open01, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::closed_forms::poisson_mass_outside;
use crate::error::{Error, Result};
use crate::geometry::{convex_hull, Hull, Point};
use crate::linalg;
use crate::tolerances;

/// Parameters of the Poisson process `Pi_{d,gamma}(c)` with intensity
/// density `(c / omega_{d+gamma}) |x|^{-(d+gamma)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonParams {
    pub d: usize,
    pub gamma: f64,
    pub c: f64,
}

impl PoissonParams {
    pub fn new(d: usize, gamma: f64, c: f64) -> Result<Self> {
        let p = Self { d, gamma, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidParams("d must be at least 1".into()));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParams(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParams(format!("c must be positive, got {}", self.c)));
        }
        Ok(())
    }

    /// Expected number of points outside the ball of radius `r`.
    pub fn mass_outside(&self, r: f64) -> f64 {
        if r.is_infinite() {
            return 0.0;
        }
        poisson_mass_outside(self.d, self.gamma, self.c, r)
    }

    /// Radius outside which the expected number of points is `mass`.
    pub fn radius_for_mass(&self, mass: f64) -> f64 {
        (self.mass_outside(1.0) / mass).powf(1.0 / self.gamma)
    }

    pub fn with_c(self, c: f64) -> Self {
        Self { c, ..self }
    }
}

/// Points of `Pi_{d,gamma}(c)` outside `r_trunc`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonSample {
    pub params: PoissonParams,
    pub points: Vec<Point>,
    pub r_trunc: f64,
    /// The ball of radius `r_trunc` lies inside the hull of `points`, so the
    /// discarded inner points cannot be vertices.
    pub certified: bool,
}

/// `n` uniform points of the upper half-sphere and their gnomonic images.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSample {
    pub d: usize,
    pub n: usize,
    pub halfsphere_points: Vec<Point>,
    pub gnomonic_points: Vec<Point>,
}

impl ConeSample {
    /// Hull of the gnomonic images, the section of the cone at `x_0 = 1`.
    pub fn section_hull(&self) -> Result<Hull> {
        convex_hull(&self.gnomonic_points, self.d)
    }
}

/// Uniform point on the unit sphere `S^{d-1}`.
pub fn uniform_direction(d: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let mut g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = linalg::norm(&g);
        if n > 0.0 {
            g.iter_mut().for_each(|x| *x /= n);
            return g;
        }
    }
}

/// Uniform point of `S^d_+ = {x in S^d : x_0 >= 0}` in `R^{d+1}`.
pub fn sample_halfsphere(d: usize, rng: &mut impl Rng) -> Point {
    let mut u = uniform_direction(d + 1, rng);
    u[0] = u[0].abs();
    Point::new(u)
}

/// Gnomonic projection `(x_1/x_0, ..., x_d/x_0)`.
pub fn gnomonic(u: &Point) -> Result<Point> {
    let c = u.coords();
    if c.len() < 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: c.len() });
    }
    if !(c[0] > tolerances::EQUATOR) {
        return Err(Error::PoleAtEquator);
    }
    Point::try_new(c[1..].iter().map(|x| x / c[0]).collect())
}

/// Point of `R^d` with density `(2/omega_{d+1}) (1 + |x|^2)^{-(d+1)/2}`.
pub fn sample_cauchy_type(d: usize, rng: &mut impl Rng) -> Point {
    loop {
        if let Ok(p) = gnomonic(&sample_halfsphere(d, rng)) {
            return p;
        }
    }
}

/// Points of `Pi_{d,gamma}(c)` with `r_in < |x| <= r_out` (`r_out` may be
/// infinite).
pub fn sample_poisson_annulus(
    params: &PoissonParams,
    r_in: f64,
    r_out: f64,
    rng: &mut impl Rng,
) -> Result<Vec<Point>> {
    params.validate()?;
    if !(r_in > 0.0 && r_in.is_finite() && r_out > r_in) {
        return Err(Error::InvalidRadii { r_in, r_out });
    }
    let mean = params.mass_outside(r_in) - params.mass_outside(r_out);
    if mean <= 0.0 {
        return Ok(Vec::new());
    }
    let count = Poisson::new(mean)
        .map_err(|e| Error::InvalidParams(e.to_string()))?
        .sample(rng) as usize;
    let g = params.gamma;
    let lo = r_in.powf(-g);
    let hi = if r_out.is_infinite() { 0.0 } else { r_out.powf(-g) };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let u: f64 = rng.sample(Open01);
        let r = (lo - u * (lo - hi)).powf(-1.0 / g);
        let dir = uniform_direction(params.d, rng);
        out.push(Point::new(dir.into_iter().map(|x| x * r).collect()));
    }
    Ok(out)
}

const MAX_HALVINGS: usize = 40;

/// Expected number of points outside the initial truncation radius.
pub fn initial_mass(d: usize) -> f64 {
    (4.0 * d as f64).max(40.0)
}

fn mirrored(points: &[Point]) -> Vec<Point> {
    points.iter().flat_map(|p| [p.clone(), p.scaled(-1.0)]).collect()
}

fn certified_hull(
    params: &PoissonParams,
    symmetric: bool,
    rng: &mut impl Rng,
) -> Result<(PoissonSample, Hull)> {
    params.validate()?;
    let d = params.d;
    let mut r = params.radius_for_mass(initial_mass(d));
    let mut points = sample_poisson_annulus(params, r, f64::INFINITY, rng)?;
    for _ in 0..=MAX_HALVINGS {
        let input = if symmetric { mirrored(&points) } else { points.clone() };
        if input.len() > d {
            let hull = convex_hull(&input, d)?;
            if hull.contains_origin() && hull.min_offset() >= r {
                let sample = PoissonSample { params: *params, points, r_trunc: r, certified: true };
                return Ok((sample, hull));
            }
        }
        let inner = r / 2.0;
        points.extend(sample_poisson_annulus(params, inner, r, rng)?);
        r = inner;
    }
    Err(Error::TruncationFailure(MAX_HALVINGS))
}

/// A certified sample of `Pi_{d,gamma}(c)` and its hull, which has the law of
/// the hull of the whole process. The truncation radius starts where the
/// expected outer count is `max(4d, 40)` and halves until the hull contains
/// the ball of that radius.
pub fn sample_poisson_hull(params: &PoissonParams, rng: &mut impl Rng) -> Result<(PoissonSample, Hull)> {
    certified_hull(params, false, rng)
}

/// Hull of `{x, -x : x in Pi_{d,gamma}(c)}`, certified in the same way.
pub fn sample_symmetric_hull(params: &PoissonParams, rng: &mut impl Rng) -> Result<Hull> {
    certified_hull(params, true, rng).map(|(_, h)| h)
}

/// `n` uniform half-sphere points and their gnomonic images; points on the
/// equator (probability zero) are redrawn.
pub fn sample_cone(d: usize, n: usize, rng: &mut impl Rng) -> Result<ConeSample> {
    if d == 0 || n < d + 1 {
        return Err(Error::InvalidParams(format!("need d >= 1 and n >= d + 1, got d={d} n={n}")));
    }
    let mut halfsphere_points = Vec::with_capacity(n);
    let mut gnomonic_points = Vec::with_capacity(n);
    while halfsphere_points.len() < n {
        let u = sample_halfsphere(d, rng);
        if let Ok(g) = gnomonic(&u) {
            halfsphere_points.push(u);
            gnomonic_points.push(g);
        }
    }
    Ok(ConeSample { d, n, halfsphere_points, gnomonic_points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn gnomonic_examples() {
        assert_eq!(gnomonic(&Point::new(vec![1.0, 0.0, 0.0])).unwrap(), Point::origin(2));
        let s = 1.0 / 2f64.sqrt();
        let g = gnomonic(&Point::new(vec![s, s, 0.0])).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-15 && g[1] == 0.0);
        assert_eq!(gnomonic(&Point::new(vec![0.0, 1.0])), Err(Error::PoleAtEquator));
    }

    #[test]
    fn halfsphere_points_are_unit_and_upper() {
        let mut rng = seeded(1);
        for d in 1..=5 {
            for _ in 0..200 {
                let u = sample_halfsphere(d, &mut rng);
                assert_eq!(u.dim(), d + 1);
                assert!((u.norm() - 1.0).abs() < 1e-12);
                assert!(u[0] >= 0.0);
            }
        }
    }

    #[test]
    fn annulus_radii_stay_inside() {
        let p = PoissonParams::new(3, 1.5, 20.0).unwrap();
        let pts = sample_poisson_annulus(&p, 0.5, 2.0, &mut seeded(2)).unwrap();
        assert!(!pts.is_empty());
        for x in &pts {
            let r = x.norm();
            assert!(r > 0.5 - 1e-12 && r <= 2.0 + 1e-12);
        }
        assert!(sample_poisson_annulus(&p, 2.0, 1.0, &mut seeded(2)).is_err());
        assert!(sample_poisson_annulus(&p, 0.0, 1.0, &mut seeded(2)).is_err());
    }

    #[test]
    fn poisson_hull_is_certified() {
        let mut rng = seeded(3);
        for (d, gamma) in [(1, 1.0), (2, 1.0), (2, 2.0), (3, 2.0), (4, 0.7)] {
            let p = PoissonParams::new(d, gamma, 2.0).unwrap();
            for _ in 0..20 {
                let (s, h) = sample_poisson_hull(&p, &mut rng).unwrap();
                assert!(s.certified);
                assert!(h.contains_origin());
                assert!(h.min_offset() >= s.r_trunc);
                assert!(s.points.iter().all(|x| x.norm() > s.r_trunc));
            }
        }
    }

    #[test]
    fn symmetric_hull_has_opposite_facets() {
        let p = PoissonParams::new(2, 2.0, 1.0).unwrap();
        let h = sample_symmetric_hull(&p, &mut seeded(4)).unwrap();
        for f in h.facets() {
            let twin = h.facets().iter().any(|g| {
                (g.offset - f.offset).abs() < 1e-9
                    && g.normal.coords().iter().zip(f.normal.coords()).all(|(a, b)| (a + b).abs() < 1e-9)
            });
            assert!(twin);
        }
    }

    #[test]
    fn cone_samples() {
        let mut rng = seeded(5);
        for _ in 0..50 {
            let c = sample_cone(1, 7, &mut rng).unwrap();
            assert_eq!(crate::geometry::f_vector(&c.section_hull().unwrap()).unwrap().counts, vec![2]);
            let c = sample_cone(2, 3, &mut rng).unwrap();
            assert_eq!(c.section_hull().unwrap().facets().len(), 3);
            for (u, g) in c.halfsphere_points.iter().zip(&c.gnomonic_points) {
                assert_eq!(&gnomonic(u).unwrap(), g);
            }
        }
        assert!(sample_cone(2, 2, &mut rng).is_err());
    }

    #[test]
    fn identical_seeds_repeat() {
        let p = PoissonParams::new(3, 1.0, 2.0).unwrap();
        let a = sample_poisson_hull(&p, &mut seeded(77)).unwrap();
        let b = sample_poisson_hull(&p, &mut seeded(77)).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }
}
