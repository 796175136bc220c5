//! Conic functionals of polyhedral cones `pos{U_1, ..., U_n}`: metric
//! projection, conic intrinsic volumes `v_k`, Grassmann angles `h_k`, mean
//! projection volumes `w_k`, solid angle and its deficit.
//!
//! A cone with all generators in `{x_0 > 0}` is handled through its section
//! hull `conv{P(U_i)}` in `R^d`, since `U` lies in the cone iff `P(U)` lies in
//! the section.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::closed_forms::{self, exact_facets_halfsphere, quadrature};
use crate::error::{Error, Result};
use crate::geometry::{affine_intersects_hull, contains_point, f_vector, radial_function, Hull, Point};
use crate::linalg;
use crate::rng;
use crate::samplers::{gnomonic, sample_cauchy_type, sample_cone, sample_halfsphere, uniform_direction, ConeSample};
use crate::stats::{Accumulator, Estimate};
use crate::tolerances;

/// Polyhedral cone in `R^m` given by generators, with its section hull when
/// every generator has a positive first coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct Cone {
    ambient: usize,
    generators: Vec<Point>,
    section_hull: Option<Hull>,
}

impl Cone {
    /// Cone spanned by the half-sphere points of a sample.
    pub fn from_sample(sample: &ConeSample) -> Result<Self> {
        Ok(Self {
            ambient: sample.d + 1,
            generators: sample.halfsphere_points.clone(),
            section_hull: Some(sample.section_hull()?),
        })
    }

    /// Cone spanned by arbitrary generators of `R^m`. The section hull exists
    /// when all generators are strictly above the equator and their gnomonic
    /// images are full-dimensional.
    pub fn from_generators(generators: Vec<Point>) -> Result<Self> {
        let m = generators.first().map(Point::dim).ok_or(Error::TooFewPoints { needed: 1, got: 0 })?;
        if m < 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: m });
        }
        for g in &generators {
            if g.dim() != m {
                return Err(Error::DimensionMismatch { expected: m, got: g.dim() });
            }
        }
        let images: Result<Vec<Point>> = generators.iter().map(gnomonic).collect();
        let section_hull = images.ok().and_then(|pts| crate::geometry::convex_hull(&pts, m - 1).ok());
        Ok(Self { ambient: m, generators, section_hull })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// `d = m - 1`, the dimension of the half-sphere.
    pub fn d(&self) -> usize {
        self.ambient - 1
    }

    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    pub fn section_hull(&self) -> Option<&Hull> {
        self.section_hull.as_ref()
    }

    fn section(&self) -> Result<&Hull> {
        self.section_hull
            .as_ref()
            .ok_or_else(|| Error::InvalidParams("cone has no section hull".into()))
    }
}

/// Metric projection onto `pos{generators}` by Lawson-Hanson nonnegative
/// least squares. Returns the projection and the generators with a positive
/// coefficient.
pub fn project_onto_cone(generators: &[Point], g: &Point) -> Result<(Point, Vec<usize>)> {
    let (x, _) = nnls(generators, g)?;
    let m = g.dim();
    let mut proj = vec![0.0; m];
    for (xi, v) in x.iter().zip(generators) {
        if *xi != 0.0 {
            linalg::axpy(*xi, v.coords(), &mut proj);
        }
    }
    let active = (0..x.len()).filter(|&i| x[i] > tolerances::ACTIVE_COEFF).collect();
    Ok((Point::new(proj), active))
}

fn nnls(generators: &[Point], g: &Point) -> Result<(Vec<f64>, usize)> {
    let m = g.dim();
    if generators.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    for v in generators {
        if v.dim() != m {
            return Err(Error::DimensionMismatch { expected: m, got: v.dim() });
        }
    }
    let n = generators.len();
    let cols: Vec<&[f64]> = generators.iter().map(Point::coords).collect();
    let scale = g.norm().max(1.0);
    let tol = 1e-12 * scale;
    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    let residual = |x: &[f64]| {
        let mut r = g.coords().to_vec();
        for (xi, c) in x.iter().zip(&cols) {
            if *xi != 0.0 {
                linalg::axpy(-xi, c, &mut r);
            }
        }
        r
    };
    let max_iter = 10 * m.max(n);
    let mut iterations = 0;
    loop {
        let r = residual(&x);
        let best = (0..n)
            .filter(|&j| !passive[j])
            .map(|j| (j, linalg::dot(cols[j], &r)))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((enter, w)) = best else { break };
        if w <= tol || iterations >= max_iter {
            break;
        }
        iterations += 1;
        passive[enter] = true;
        loop {
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let sub: Vec<&[f64]> = idx.iter().map(|&j| cols[j]).collect();
            let z = linalg::least_squares(&sub, g.coords()).ok_or(Error::IllConditioned)?;
            if z.iter().all(|&zi| zi > 0.0) {
                for (k, &j) in idx.iter().enumerate() {
                    x[j] = z[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, &j) in idx.iter().enumerate() {
                if z[k] <= 0.0 {
                    alpha = alpha.min(x[j] / (x[j] - z[k]));
                }
            }
            for (k, &j) in idx.iter().enumerate() {
                x[j] += alpha * (z[k] - x[j]);
                if x[j] <= tolerances::ACTIVE_COEFF * scale {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
            if idx.iter().all(|&j| !passive[j]) {
                break;
            }
        }
    }
    // Optimality: the residual has no positive correlation with any generator
    // and is orthogonal to the projection.
    let r = residual(&x);
    let worst = (0..n).map(|j| linalg::dot(cols[j], &r)).fold(0.0, f64::max);
    if worst > tolerances::KKT * scale {
        return Err(Error::IllConditioned);
    }
    Ok((x, iterations))
}

/// Estimates of the conic intrinsic volumes, Grassmann angles and mean
/// projection volumes of one cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConicProfile {
    pub m: usize,
    pub samples: usize,
    /// `v_0, ..., v_m`.
    pub v: Vec<f64>,
    pub v_stderr: Vec<f64>,
    /// `h_1, ..., h_m` from `h_{k+1} = v_{k+1} + v_{k+3} + ...`.
    pub h_from_v: Vec<f64>,
    pub h_from_v_stderr: Vec<f64>,
    /// `w_1, ..., w_m` from `w_{k+1} = v_{k+1} + v_{k+2} + ... + v_m`.
    pub w_from_v: Vec<f64>,
    pub w_from_v_stderr: Vec<f64>,
    /// `h_1, ..., h_m` from random subspaces; empty without a section hull.
    pub h_direct: Vec<f64>,
    pub h_direct_stderr: Vec<f64>,
    /// `w_{k+1} = h_{k+1} + h_{k+2}` from the direct Grassmann angles.
    pub w_direct: Vec<f64>,
    pub w_direct_stderr: Vec<f64>,
    /// Gaussian draws whose active generators were linearly dependent.
    pub rank_deficient_draws: usize,
}

impl ConicProfile {
    pub fn even_sum(&self) -> f64 {
        self.v.iter().step_by(2).sum()
    }

    pub fn odd_sum(&self) -> f64 {
        self.v.iter().skip(1).step_by(2).sum()
    }

    /// Standard error of the even (equivalently odd) sum of `v`.
    pub fn parity_stderr(&self) -> f64 {
        let p = self.even_sum();
        binomial_stderr(p, self.samples)
    }
}

fn binomial_stderr(p: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

fn frequencies_of(counts: &[usize], samples: usize, pick: impl Fn(usize) -> bool) -> (f64, f64) {
    let hits: usize = counts.iter().enumerate().filter(|(i, _)| pick(*i)).map(|(_, c)| c).sum();
    let p = hits as f64 / samples as f64;
    (p, binomial_stderr(p, samples))
}

/// Conic intrinsic volumes from the face dimension at the projection of
/// standard Gaussian vectors, given by the rank of the active generators.
/// Fills the `v`, `h_from_v` and `w_from_v` parts of the profile.
pub fn conic_intrinsic_volumes(cone: &Cone, samples: usize, rng: &mut impl Rng) -> Result<ConicProfile> {
    let m = cone.ambient;
    let mut counts = vec![0usize; m + 1];
    let mut rank_deficient = 0;
    for _ in 0..samples {
        let g = Point::new((0..m).map(|_| rng.sample(rand_distr::StandardNormal)).collect());
        let (_, active) = project_onto_cone(&cone.generators, &g)?;
        let columns: Vec<Vec<f64>> = active.iter().map(|&i| cone.generators[i].coords().to_vec()).collect();
        let rank = linalg::pivoted_qr_rank(&columns, tolerances::RANK);
        if rank < active.len() {
            rank_deficient += 1;
        }
        counts[rank.min(m)] += 1;
    }
    let n = samples.max(1);
    let (v, v_stderr): (Vec<f64>, Vec<f64>) =
        (0..=m).map(|i| frequencies_of(&counts, n, |j| j == i)).unzip();
    let (h_from_v, h_from_v_stderr): (Vec<f64>, Vec<f64>) = (0..m)
        .map(|k| frequencies_of(&counts, n, |j| j > k && (j - k) % 2 == 1))
        .unzip();
    let (w_from_v, w_from_v_stderr): (Vec<f64>, Vec<f64>) =
        (0..m).map(|k| frequencies_of(&counts, n, |j| j > k)).unzip();
    Ok(ConicProfile {
        m,
        samples,
        v,
        v_stderr,
        h_from_v,
        h_from_v_stderr,
        w_from_v,
        w_from_v_stderr,
        h_direct: Vec::new(),
        h_direct_stderr: Vec::new(),
        w_direct: Vec::new(),
        w_direct_stderr: Vec::new(),
        rank_deficient_draws: rank_deficient,
    })
}

/// One trial for `h_{k+1}`: whether the affine hull of `d + 1 - k` fresh
/// Cauchy-type points meets the section hull, i.e. whether a Haar subspace
/// of dimension `d + 1 - k` meets the cone outside the origin.
fn grassmann_trial(section: &Hull, k: usize, rng: &mut impl Rng) -> Result<bool> {
    let d = section.dim();
    let j = d + 1 - k;
    let z: Vec<Point> = (0..j).map(|_| sample_cauchy_type(d, rng)).collect();
    if j == 1 {
        return contains_point(section, &z[0]);
    }
    affine_intersects_hull(&z[0], &z[1..], section.vertices())
}

/// Monte Carlo estimate of `h_{k+1} = P(C meets L)/2` for a Haar subspace
/// `L` of dimension `d + 1 - k`; `h_1 = 1/2` exactly.
pub fn grassmann_angle(cone: &Cone, k: usize, samples: usize, rng: &mut impl Rng) -> Result<Estimate> {
    let d = cone.d();
    if k > d {
        return Err(Error::InvalidK { k, d });
    }
    let target = format!("h_{}", k + 1);
    if k == 0 {
        return Ok(Estimate::exact(&target, 0.5, 0));
    }
    let section = cone.section()?;
    let mut acc = Accumulator::default();
    for _ in 0..samples {
        acc.push(if grassmann_trial(section, k, rng)? { 0.5 } else { 0.0 });
    }
    Ok(acc.estimate(&target, 0))
}

/// Solid angle: half the frequency with which a fresh uniform half-sphere
/// point falls in the cone.
pub fn solid_angle(cone: &Cone, samples: usize, rng: &mut impl Rng) -> Result<Estimate> {
    let section = cone.section()?;
    let mut acc = Accumulator::default();
    for _ in 0..samples {
        let inside = match gnomonic(&sample_halfsphere(cone.d(), rng)) {
            Ok(y) => contains_point(section, &y)?,
            Err(_) => false,
        };
        acc.push(if inside { 0.5 } else { 0.0 });
    }
    Ok(acc.estimate("solid_angle", 0))
}

/// `G(rho) = (2/omega_{d+1}) int_{arctan rho}^{pi/2} sin^{d-1} t dt`: the
/// Cauchy-type mass beyond radius `rho` along one direction, per unit of
/// sphere measure.
fn radial_tail(d: usize, rho: f64) -> Result<f64> {
    let scale = 2.0 / closed_forms::omega(d as f64 + 1.0)?;
    let lo = rho.atan();
    let hi = std::f64::consts::FRAC_PI_2;
    let integral = match d {
        1 => hi - lo,
        2 => lo.cos(),
        _ => quadrature::integrate(|t| t.sin().powi(d as i32 - 1), lo, hi, tolerances::QUADRATURE),
    };
    Ok(scale * integral)
}

/// `n (1/2 - alpha)` for the cone, as `(n/2) P(Y not in K)` with `Y`
/// Cauchy-type and `K` the section hull, integrated in polar coordinates
/// over `mc_dirs` uniform directions (both directions exactly when `d = 1`).
pub fn deficit_solid_angle(cone: &Cone, n: usize, mc_dirs: usize, rng: &mut impl Rng) -> Result<Estimate> {
    let section = cone.section()?;
    if !section.contains_origin() {
        return Err(Error::OriginOutside);
    }
    let d = cone.d();
    let half_n = n as f64 / 2.0;
    if d == 1 {
        let mut total = 0.0;
        for s in [1.0, -1.0] {
            total += radial_tail(1, radial_function(section, &Point::new(vec![s]))?)?;
        }
        return Ok(Estimate::exact("deficit_solid_angle", half_n * total, 0));
    }
    let omega_d = closed_forms::omega(d as f64)?;
    let mut acc = Accumulator::default();
    for _ in 0..mc_dirs {
        let u = Point::new(uniform_direction(d, rng));
        let rho = radial_function(section, &u)?;
        acc.push(half_n * omega_d * radial_tail(d, rho)?);
    }
    Ok(acc.estimate("deficit_solid_angle", 0))
}

/// Full profile: `v` from Gaussian projections, `h` both from `v` (Crofton)
/// and from random subspaces, `w` from both `h` routes (Kubota).
pub fn conic_profile(cone: &Cone, samples: usize, rng: &mut impl Rng) -> Result<ConicProfile> {
    let mut profile = conic_intrinsic_volumes(cone, samples, rng)?;
    if cone.section_hull.is_none() {
        return Ok(profile);
    }
    let m = cone.ambient;
    let mut h = Vec::with_capacity(m);
    for k in 0..m {
        h.push(grassmann_angle(cone, k, samples, rng)?);
    }
    profile.h_direct = h.iter().map(|e| e.mean).collect();
    profile.h_direct_stderr = h.iter().map(|e| e.stderr).collect();
    for k in 0..m {
        let next = h.get(k + 1);
        profile.w_direct.push(h[k].mean + next.map_or(0.0, |e| e.mean));
        profile.w_direct_stderr.push(h[k].stderr.hypot(next.map_or(0.0, |e| e.stderr)));
    }
    Ok(profile)
}

/// Both sides of `2 C(n+j, j) (1/2 - E h_{k+1}(C_n)) = E f_j(C_{n+j})`,
/// `j = d + 1 - k`, estimated independently.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuchtaReport {
    pub d: usize,
    pub n: usize,
    pub k: usize,
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub z: f64,
    /// Closed-form left side where the law is known (`d = 1`).
    pub lhs_exact: Option<f64>,
    /// Closed-form right side where known (`k = 1`: the facet count formula).
    pub rhs_exact: Option<f64>,
}

/// Monte Carlo check of the identity with `samples` independent cones per
/// side. Cone `j`-faces are section `(j-1)`-faces.
pub fn buchta_identity_check(d: usize, n: usize, k: usize, samples: usize, seed: u64) -> Result<BuchtaReport> {
    if k == 0 || k > d {
        return Err(Error::InvalidParams(format!("need 1 <= k <= d, got k={k} d={d}")));
    }
    if n < d + 1 {
        return Err(Error::InvalidParams(format!("need n >= d + 1, got n={n}")));
    }
    let j = d + 1 - k;
    let weight = 2.0 * closed_forms::binomial(n + j, j);
    let left: Vec<Result<f64>> = rng::par_replicates(rng::derive_seed(seed, 0), samples, |_, r| {
        let cone = sample_cone(d, n, r)?;
        let section = cone.section_hull()?;
        Ok(if grassmann_trial(&section, k, r)? { 0.0 } else { 0.5 * weight })
    });
    let right: Vec<Result<f64>> = rng::par_replicates(rng::derive_seed(seed, 1), samples, |_, r| {
        let cone = sample_cone(d, n + j, r)?;
        Ok(f_vector(&cone.section_hull()?)?.counts[j - 1] as f64)
    });
    let lhs = collect("buchta_lhs", left, seed)?;
    let rhs = collect("buchta_rhs", right, seed)?;
    let z = lhs.z_difference(&rhs);
    let lhs_exact = (d == 1).then(|| weight * (1.0 / (n + 1) as f64));
    let rhs_exact = if k == 1 { Some(exact_facets_halfsphere(d, n + d)?) } else { None };
    Ok(BuchtaReport { d, n, k, lhs, rhs, z, lhs_exact, rhs_exact })
}

fn collect(target: &str, values: Vec<Result<f64>>, seed: u64) -> Result<Estimate> {
    let mut acc = Accumulator::default();
    for v in values {
        acc.push(v?);
    }
    Ok(acc.estimate(target, seed))
}
