//! Monte Carlo estimators of expectations over random hulls: f-vectors,
//! T-functionals, volumes, intrinsic volumes and the limit constants
//! `B_{k,d}`. Replicates run in parallel with derived seeds and are reduced
//! in replicate order.

use serde::{Deserialize, Serialize};

use crate::closed_forms::{self, exact_facets_halfsphere, limit_f_vector, OracleValue};
use crate::error::{Error, Result};
use crate::geometry::{
    affine_intersects_hull, convex_hull, f_vector, haar_subspace, hull_volume, project_points,
    t_functional, Hull,
};
use crate::rng::{self, SimRng};
use crate::samplers::{
    sample_cauchy_type, sample_cone, sample_poisson_hull, sample_symmetric_hull, PoissonParams,
};
use crate::stats::{Accumulator, Estimate};

/// Failures of the exact per-hull identities, counted over many hulls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityTally {
    pub hulls: usize,
    pub euler_failures: usize,
    pub dehn_sommerville_failures: usize,
    pub t00_failures: usize,
    /// Hulls with the origin inside, where `T_{1,1} = d Vol` is checked.
    pub t11_checked: usize,
    pub t11_failures: usize,
}

impl IdentityTally {
    pub fn merge(&mut self, other: &IdentityTally) {
        self.hulls += other.hulls;
        self.euler_failures += other.euler_failures;
        self.dehn_sommerville_failures += other.dehn_sommerville_failures;
        self.t00_failures += other.t00_failures;
        self.t11_checked += other.t11_checked;
        self.t11_failures += other.t11_failures;
    }

    pub fn all_hold(&self) -> bool {
        self.euler_failures == 0
            && self.dehn_sommerville_failures == 0
            && self.t00_failures == 0
            && self.t11_failures == 0
    }
}

/// Checks Euler, Dehn-Sommerville, `T_{0,0} = f_{d-1}` and, with the origin
/// inside, `T_{1,1} = d Vol` to `1e-9` relative.
pub fn check_hull_identities(h: &Hull) -> Result<IdentityTally> {
    let f = f_vector(h)?;
    let d = h.dim();
    let mut tally = IdentityTally { hulls: 1, ..Default::default() };
    tally.euler_failures += usize::from(f.euler_defect() != 0);
    tally.dehn_sommerville_failures += usize::from(f.dehn_sommerville_defect() != 0);
    tally.t00_failures += usize::from(t_functional(h, 0.0, 0.0)? != f.counts[d - 1] as f64);
    if h.contains_origin() {
        tally.t11_checked = 1;
        let t11 = t_functional(h, 1.0, 1.0)?;
        let vol = d as f64 * hull_volume(h)?;
        tally.t11_failures += usize::from((t11 - vol).abs() > 1e-9 * t11.abs());
    }
    Ok(tally)
}

/// Estimates with a heavy-tail flag and the identity checks of every hull
/// that went into them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub estimates: Vec<Estimate>,
    /// The second moment of the target may be infinite, so the standard
    /// error is unreliable.
    pub heavy_tail: bool,
    pub identities: IdentityTally,
}

impl McResult {
    pub fn scalar(&self) -> &Estimate {
        &self.estimates[0]
    }
}

/// Whether `E T_{a,b}^2` may be infinite: the finiteness condition of
/// `E T_{a,b}` with `a` and `b` doubled fails.
pub fn heavy_tail_t(d: usize, gamma: f64, a: f64, b: f64) -> bool {
    let d = d as f64;
    (gamma - 2.0 * b) * d + 2.0 * b - 2.0 * a <= 0.0 || gamma <= 2.0 * b
}

/// Runs `value` on certified hulls in parallel and reduces vectors of
/// per-replicate values in replicate order.
fn over_hulls<F>(
    params: &PoissonParams,
    symmetric: bool,
    replicates: usize,
    seed: u64,
    targets: &[String],
    value: F,
) -> Result<(Vec<Estimate>, IdentityTally)>
where
    F: Fn(&Hull, &mut SimRng) -> Result<Vec<f64>> + Sync,
{
    params.validate()?;
    let rows = rng::par_replicates(seed, replicates, |_, r| -> Result<(Vec<f64>, IdentityTally)> {
        let hull = if symmetric {
            sample_symmetric_hull(params, r)?
        } else {
            sample_poisson_hull(params, r)?.1
        };
        let tally = check_hull_identities(&hull)?;
        Ok((value(&hull, r)?, tally))
    });
    let mut accs = vec![Accumulator::default(); targets.len()];
    let mut tally = IdentityTally::default();
    for row in rows {
        let (values, t) = row?;
        for (acc, v) in accs.iter_mut().zip(values) {
            acc.push(v);
        }
        tally.merge(&t);
    }
    Ok((accs.iter().zip(targets).map(|(a, t)| a.estimate(t, seed)).collect(), tally))
}

/// Mean f-vector of the hull of `Pi_{d,gamma}(c)`.
pub fn estimate_f_vector_poisson(params: &PoissonParams, replicates: usize, seed: u64) -> Result<McResult> {
    let targets: Vec<String> = (0..params.d).map(|k| format!("f_{k}")).collect();
    let (estimates, identities) = over_hulls(params, false, replicates, seed, &targets, |h, _| {
        Ok(f_vector(h)?.counts.iter().map(|&c| c as f64).collect())
    })?;
    Ok(McResult { estimates, heavy_tail: false, identities })
}

fn estimate_t_inner(
    params: &PoissonParams,
    a: f64,
    b: f64,
    replicates: usize,
    seed: u64,
    symmetric: bool,
) -> Result<McResult> {
    let name = if symmetric { "T_sym" } else { "T" };
    let targets = [format!("{name}_{a}_{b}")];
    let (estimates, identities) =
        over_hulls(params, symmetric, replicates, seed, &targets, |h, _| Ok(vec![t_functional(h, a, b)?]))?;
    Ok(McResult { estimates, heavy_tail: heavy_tail_t(params.d, params.gamma, a, b), identities })
}

/// Mean of `T_{a,b}` over hulls of `Pi_{d,gamma}(c)`.
pub fn estimate_t(params: &PoissonParams, a: f64, b: f64, replicates: usize, seed: u64) -> Result<McResult> {
    estimate_t_inner(params, a, b, replicates, seed, false)
}

/// Mean of `T_{a,b}` over symmetric hulls `sconv Pi_{d,gamma}(c)`.
pub fn estimate_t_symmetric(
    params: &PoissonParams,
    a: f64,
    b: f64,
    replicates: usize,
    seed: u64,
) -> Result<McResult> {
    estimate_t_inner(params, a, b, replicates, seed, true)
}

/// Mean volume of the hull of `Pi_{d,gamma}(c)`.
pub fn estimate_volume(params: &PoissonParams, replicates: usize, seed: u64) -> Result<McResult> {
    let targets = ["volume".to_string()];
    let (estimates, identities) =
        over_hulls(params, false, replicates, seed, &targets, |h, _| Ok(vec![hull_volume(h)?]))?;
    Ok(McResult { estimates, heavy_tail: heavy_tail_t(params.d, params.gamma, 1.0, 1.0), identities })
}

/// Mean `k`-th intrinsic volume: per hull, the `k`-volume of its projection
/// onto `dirs` fresh Haar `k`-subspaces, averaged and multiplied by
/// `C(d,k) kappa_d / (kappa_k kappa_{d-k})`. For `k = d` this is the volume.
pub fn estimate_intrinsic_volume(
    params: &PoissonParams,
    k: usize,
    dirs: usize,
    replicates: usize,
    seed: u64,
) -> Result<McResult> {
    let d = params.d;
    if k == 0 || k > d {
        return Err(Error::InvalidK { k, d });
    }
    if k < d && dirs == 0 {
        return Err(Error::InvalidParams("need at least one projection direction".into()));
    }
    let pref = closed_forms::binomial(d, k) * closed_forms::kappa(d as f64)?
        / (closed_forms::kappa(k as f64)? * closed_forms::kappa((d - k) as f64)?);
    let targets = [format!("V_{k}")];
    let (estimates, identities) = over_hulls(params, false, replicates, seed, &targets, |h, r| {
        if k == d {
            return Ok(vec![hull_volume(h)?]);
        }
        let mut acc = Accumulator::default();
        for _ in 0..dirs {
            let l = haar_subspace(d, k, r);
            let shadow = convex_hull(&project_points(h.vertices(), &l)?, k)?;
            acc.push(hull_volume(&shadow)?);
        }
        Ok(vec![pref * acc.mean()])
    })?;
    Ok(McResult { estimates, heavy_tail: heavy_tail_t(k, params.gamma, 1.0, 1.0), identities })
}

/// Importance-sampling estimate of
/// `B_{k,d} = (1/2)(2/omega_{d+1})^k int P(conv Pi_{d,1}(2) misses aff{x_1..x_k}) prod |x_i|^{-(d+1)} dx_i`.
///
/// Given the hull, the `x_i` are drawn from the Cauchy-type law scaled by
/// the hull's inradius `s`, density `(2/omega_{d+1}) s (s^2+|x|^2)^{-(d+1)/2}`,
/// so each point carries the weight `s^{-1} ((s^2+|x|^2)/|x|^2)^{(d+1)/2}`,
/// which stays below `2^{(d+1)/2}/s` for points outside the hull.
pub fn estimate_b(k: usize, d: usize, outer_replicates: usize, inner_samples: usize, seed: u64) -> Result<McResult> {
    if k == 0 || k > d {
        return Err(Error::InvalidK { k, d });
    }
    if inner_samples == 0 {
        return Err(Error::InvalidParams("need at least one inner sample".into()));
    }
    let params = PoissonParams::new(d, 1.0, 2.0)?;
    let exponent = 0.5 * (d as f64 + 1.0);
    let targets = [format!("B_{k}_{d}")];
    let (estimates, identities) = over_hulls(&params, false, outer_replicates, seed, &targets, |h, r| {
        let scale = h.min_offset();
        let mut acc = Accumulator::default();
        for _ in 0..inner_samples {
            let x: Vec<_> = (0..k).map(|_| sample_cauchy_type(d, r).scaled(scale)).collect();
            if affine_intersects_hull(&x[0], &x[1..], h.vertices())? {
                acc.push(0.0);
                continue;
            }
            let mut w = 0.5;
            for xi in &x {
                let r2 = xi.dot(xi);
                if r2.sqrt() < 1e-6 {
                    return Err(Error::WeightOverflow(r2.sqrt()));
                }
                w *= ((scale * scale + r2) / r2).powf(exponent) / scale;
            }
            acc.push(w);
        }
        Ok(vec![acc.mean()])
    })?;
    Ok(McResult { estimates, heavy_tail: false, identities })
}

/// One row of [`estimate_cone_section_limit`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionLimitRow {
    /// Number of cone generators; `None` for the Poisson reference row.
    pub n: Option<usize>,
    /// Mean section f-vector `(f_0, ..., f_{d-1})`, i.e. cone faces of
    /// dimensions `1..=d`.
    pub f: Vec<Estimate>,
    /// Closed form for the facet column: the exact cone formula at `n`, the
    /// limit on the reference row.
    pub facet_oracle: f64,
    /// Known limits of every column (reference row only).
    pub limit: Vec<OracleValue>,
}

/// Mean face counts of the cone section for each `n` of an increasing grid,
/// followed by the Poisson hull `conv Pi_{d,1}(2)` they approach.
pub fn estimate_cone_section_limit(
    d: usize,
    n_grid: &[usize],
    replicates: usize,
    seed: u64,
) -> Result<(Vec<SectionLimitRow>, IdentityTally)> {
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParams("n grid must be increasing".into()));
    }
    let mut rows = Vec::with_capacity(n_grid.len() + 1);
    let mut tally = IdentityTally::default();
    for (j, &n) in n_grid.iter().enumerate() {
        let sub = rng::derive_seed(seed, j as u64);
        let results = rng::par_replicates(sub, replicates, |_, r| -> Result<(Vec<usize>, IdentityTally)> {
            let hull = sample_cone(d, n, r)?.section_hull()?;
            Ok((f_vector(&hull)?.counts, check_hull_identities(&hull)?))
        });
        let mut accs = vec![Accumulator::default(); d];
        for res in results {
            let (counts, t) = res?;
            for (acc, c) in accs.iter_mut().zip(counts) {
                acc.push(c as f64);
            }
            tally.merge(&t);
        }
        rows.push(SectionLimitRow {
            n: Some(n),
            f: accs.iter().enumerate().map(|(k, a)| a.estimate(&format!("f_{k}"), sub)).collect(),
            facet_oracle: exact_facets_halfsphere(d, n)?,
            limit: Vec::new(),
        });
    }
    let reference = estimate_f_vector_poisson(
        &PoissonParams::new(d, 1.0, 2.0)?,
        replicates,
        rng::derive_seed(seed, n_grid.len() as u64),
    )?;
    tally.merge(&reference.identities);
    rows.push(SectionLimitRow {
        n: None,
        f: reference.estimates,
        facet_oracle: closed_forms::limit_facets_halfsphere(d),
        limit: limit_f_vector(d),
    });
    Ok((rows, tally))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t00_equals_facet_entry_per_replicate() {
        let p = PoissonParams::new(2, 1.5, 1.0).unwrap();
        let f = estimate_f_vector_poisson(&p, 200, 9).unwrap();
        let t = estimate_t(&p, 0.0, 0.0, 200, 9).unwrap();
        assert_eq!(f.estimates[1].mean, t.scalar().mean);
        assert_eq!(f.estimates[1].stderr, t.scalar().stderr);
        assert!(f.identities.all_hold() && f.identities.hulls == 200);
    }

    #[test]
    fn intrinsic_top_degree_is_volume() {
        let p = PoissonParams::new(2, 3.0, 2.0).unwrap();
        let v = estimate_volume(&p, 100, 4).unwrap();
        let w = estimate_intrinsic_volume(&p, 2, 8, 100, 4).unwrap();
        assert_eq!(v.scalar().mean, w.scalar().mean);
    }

    #[test]
    fn heavy_tail_flags() {
        assert!(!heavy_tail_t(2, 2.0, 0.0, 0.0));
        assert!(heavy_tail_t(2, 1.0, 1.0, 0.0));
        assert!(heavy_tail_t(2, 2.0, 1.0, 1.0));
        assert!(!heavy_tail_t(2, 3.0, 1.0, 1.0));
    }

    #[test]
    fn seed_determinism_across_pools() {
        let p = PoissonParams::new(3, 2.0, 1.0).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| estimate_f_vector_poisson(&p, 64, 21).unwrap());
        let b = four.install(|| estimate_f_vector_poisson(&p, 64, 21).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn section_limit_one_dimensional() {
        let (rows, tally) = estimate_cone_section_limit(1, &[3, 10, 40], 50, 2).unwrap();
        assert_eq!(rows.len(), 4);
        for row in &rows {
            assert_eq!(row.f[0].mean, 2.0);
            assert_eq!(row.f[0].stderr, 0.0);
        }
        assert!(tally.all_hold());
        assert!(estimate_cone_section_limit(1, &[5, 5], 5, 2).is_err());
    }
}
