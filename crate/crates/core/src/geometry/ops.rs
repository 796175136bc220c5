use rand::Rng;
use rand_distr::StandardNormal;

use super::hull::Hull;
use super::lp::point_in_conv_lp;
use super::{check_dim, Point, Subspace};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::{self, SimRng};
use crate::stats::{Accumulator, Estimate};
use crate::tolerances;

/// Closed-hull membership: every facet inequality holds up to the geometric
/// slack.
pub fn contains_point(h: &Hull, x: &Point) -> Result<bool> {
    check_dim(x, h.dim())?;
    Ok(h.facets().iter().all(|f| {
        f.signed_distance(x.coords()) <= tolerances::geometric(f.offset.abs())
    }))
}

/// Whether `aff{anchor, span_points}` meets `conv(hull_points)`. Both sets are
/// projected onto the orthogonal complement of the direction space, where the
/// affine hull collapses to one point.
pub fn affine_intersects_hull(
    anchor: &Point,
    span_points: &[Point],
    hull_points: &[Point],
) -> Result<bool> {
    let d = anchor.dim();
    for p in span_points.iter().chain(hull_points) {
        check_dim(p, d)?;
    }
    if hull_points.is_empty() {
        return Ok(false);
    }
    let directions: Vec<Point> = span_points
        .iter()
        .map(|p| Point::new(linalg::sub(p.coords(), anchor.coords())))
        .collect();
    let span = Subspace::from_spanning(d, &directions)?;
    if span.dim() == d {
        return Ok(true);
    }
    let complement = span.complement();
    let projected: Vec<Vec<f64>> = hull_points
        .iter()
        .map(|p| complement.coordinates(&linalg::sub(p.coords(), anchor.coords())))
        .collect();
    if complement.dim() == 1 {
        let (lo, hi) = projected
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y[0]), hi.max(y[0])));
        let slack = tolerances::GEOMETRIC * lo.abs().max(hi.abs());
        return Ok(lo <= slack && hi >= -slack);
    }
    let points: Vec<Point> = projected.into_iter().map(Point::new).collect();
    Ok(point_in_conv_lp(&Point::origin(complement.dim()), &points))
}

/// Orthogonal projections expressed in the basis of `target`.
pub fn project_points(points: &[Point], target: &Subspace) -> Result<Vec<Point>> {
    points
        .iter()
        .map(|p| {
            check_dim(p, target.ambient_dim())?;
            Ok(Point::new(target.coordinates(p.coords())))
        })
        .collect()
}

/// `k`-volume of the simplex on `k + 1` vertices: the spanned parallelotope
/// volume over `k!`.
/// Degenerate simplices have volume zero; a single point has volume one.
pub fn simplex_volume(vertices: &[Point]) -> f64 {
    assert!(!vertices.is_empty(), "simplex needs a vertex");
    let k = vertices.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let base = vertices[0].coords();
    let edges: Vec<Vec<f64>> = vertices[1..].iter().map(|v| linalg::sub(v.coords(), base)).collect();
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    let d = base.len();
    if k == d {
        let flat: Vec<f64> = edges.concat();
        linalg::determinant(flat, d).abs() / factorial
    } else {
        linalg::parallelotope_volume(&edges) / factorial
    }
}

fn facet_volume(h: &Hull, vertices: &[usize]) -> f64 {
    let pts: Vec<Point> = vertices.iter().map(|&i| h.vertices()[i].clone()).collect();
    simplex_volume(&pts)
}

fn require_simplicial(h: &Hull) -> Result<()> {
    match h.facets().iter().find(|f| f.vertices.len() != h.dim()) {
        Some(f) => Err(Error::NonSimplicial(f.vertices.len())),
        None => Ok(()),
    }
}

/// Volume of the hull as a sum of simplex determinants over the facets, with
/// apex at the origin when it is interior and at the vertex centroid
/// otherwise. Every term is non-negative, so far outliers cost no accuracy.
pub fn hull_volume(h: &Hull) -> Result<f64> {
    require_simplicial(h)?;
    let d = h.dim();
    let mut apex = vec![0.0; d];
    if !h.contains_origin() {
        for v in h.vertices() {
            linalg::axpy(1.0 / h.vertices().len() as f64, v.coords(), &mut apex);
        }
    }
    let factorial: f64 = (1..=d).map(|i| i as f64).product();
    Ok(h.facets()
        .iter()
        .map(|f| {
            let flat: Vec<f64> =
                f.vertices.iter().flat_map(|&i| linalg::sub(h.vertices()[i].coords(), &apex)).collect();
            linalg::determinant(flat, d).abs()
        })
        .sum::<f64>()
        / factorial)
}

/// `sum over facets of |offset|^a * Vol_{d-1}(F)^b`.
pub fn t_functional(h: &Hull, a: f64, b: f64) -> Result<f64> {
    require_simplicial(h)?;
    Ok(h.facets()
        .iter()
        .map(|f| {
            let dist = if a == 0.0 { 1.0 } else { f.offset.abs().powf(a) };
            let vol = if b == 0.0 { 1.0 } else { facet_volume(h, &f.vertices).powf(b) };
            dist * vol
        })
        .sum())
}

/// Distance from the origin to the boundary along `direction`.
pub fn radial_function(h: &Hull, direction: &Point) -> Result<f64> {
    check_dim(direction, h.dim())?;
    if !h.contains_origin() {
        return Err(Error::OriginOutside);
    }
    Ok(radial_unchecked(h, direction.coords()))
}

fn radial_unchecked(h: &Hull, u: &[f64]) -> f64 {
    h.facets()
        .iter()
        .filter_map(|f| {
            let c = linalg::dot(f.normal.coords(), u);
            (c > 0.0).then(|| f.offset / c)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Monte Carlo estimate of `int_{R^d \ h} |x|^{-(d+1)} dx = omega_d E[1/rho(theta)]`
/// over uniform directions. In dimension one both directions are summed
/// exactly.
pub fn complement_power_integral(h: &Hull, mc_dirs: usize, rng_seed: u64) -> Result<Estimate> {
    if !h.contains_origin() {
        return Err(Error::OriginOutside);
    }
    let d = h.dim();
    let target = "complement_power_integral";
    if d == 1 {
        let value = 1.0 / radial_unchecked(h, &[1.0]) + 1.0 / radial_unchecked(h, &[-1.0]);
        return Ok(Estimate::exact(target, value, rng_seed));
    }
    let omega = crate::closed_forms::omega(d as f64)?;
    let mut rng = rng::seeded(rng_seed);
    let mut acc = Accumulator::default();
    for _ in 0..mc_dirs {
        let u = crate::samplers::uniform_direction(d, &mut rng);
        acc.push(omega / radial_unchecked(h, &u));
    }
    Ok(acc.estimate(target, rng_seed))
}

/// Rotation-invariant random `k`-subspace of `R^d`.
pub fn haar_subspace(d: usize, k: usize, rng: &mut SimRng) -> Subspace {
    assert!(1 <= k && k <= d, "need 1 <= k <= d");
    loop {
        let gauss: Vec<Point> = (0..k)
            .map(|_| Point::new((0..d).map(|_| rng.sample(StandardNormal)).collect()))
            .collect();
        if let Ok(s) = Subspace::from_spanning(d, &gauss) {
            return s;
        }
    }
}
