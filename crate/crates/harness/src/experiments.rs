//! One function per experiment kind, each producing report rows. Estimator
//! errors become error rows and never abort sibling rows.

use std::time::Instant;

use conehull_core::closed_forms::{
    self, constant_b, expected_facets_poisson, expected_intrinsic_volume, expected_t,
    expected_t_symmetric, expected_volume_poisson, non_absorption_1d, omega, OracleValue,
};
use conehull_core::conic::{buchta_identity_check, conic_profile, Cone, ConicProfile};
use conehull_core::functionals::{
    estimate_b, estimate_cone_section_limit, estimate_f_vector_poisson, estimate_intrinsic_volume,
    estimate_t, estimate_t_symmetric, estimate_volume, IdentityTally, McResult,
};
use conehull_core::geometry::{contains_point, haar_subspace, project_points};
use conehull_core::rng::{derive_seed, par_replicates, seeded};
use conehull_core::samplers::{
    sample_cauchy_type, sample_cone, sample_halfsphere, sample_poisson_annulus,
    sample_poisson_hull, PoissonParams,
};
use conehull_core::stats::{ks_test, poisson_chi_square, Accumulator};
use conehull_core::{tolerances, Estimate, Point};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::report::{Row, Z_PASS};

/// z-threshold of the conic and Buchta identity rows.
pub const Z_IDENTITY: f64 = 3.0;

/// Rows of one experiment together with the identity checks of every hull
/// sampled along the way.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub identities: IdentityTally,
}

impl Outcome {
    fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    fn extend(&mut self, other: Outcome) {
        self.rows.extend(other.rows);
        self.identities.merge(&other.identities);
    }
}

fn mc_rows(out: &mut Outcome, params: &str, result: &McResult, oracles: &[OracleValue]) {
    for (est, oracle) in result.estimates.iter().zip(oracles) {
        let row = Row::statistical(params, est, *oracle, Z_PASS);
        out.push(if result.heavy_tail { row.with_note("heavy-tail") } else { row });
    }
    out.identities.merge(&result.identities);
}

/// Oracles for the f-vector of a simplicial hull whose facet count has mean
/// `facets`: `f_{d-2} = d f_{d-1} / 2`, and Euler for `d <= 3`.
pub fn f_vector_oracles(d: usize, facets: f64) -> Vec<OracleValue> {
    let mut out = vec![OracleValue::Unknown; d];
    out[d - 1] = OracleValue::Finite(facets);
    if d >= 2 {
        out[d - 2] = OracleValue::Finite(d as f64 * facets / 2.0);
    }
    if d == 3 {
        out[0] = OracleValue::Finite(facets / 2.0 + 2.0);
    }
    out
}

fn poisson_params(cfg: &ExperimentConfig) -> conehull_core::Result<PoissonParams> {
    PoissonParams::new(cfg.int("d", 0), cfg.float("gamma", f64::NAN), cfg.float("c", 1.0))
}

fn oracle_of(r: conehull_core::Result<closed_forms::Oracle>) -> OracleValue {
    r.map_or(OracleValue::Unknown, |o| o.value)
}

pub fn poisson_f(params: &PoissonParams, replicates: usize, seed: u64) -> Outcome {
    let label = format!("d={};gamma={};c={}", params.d, params.gamma, params.c);
    let mut out = Outcome::default();
    match estimate_f_vector_poisson(params, replicates, seed) {
        Ok(r) => {
            let oracles = expected_facets_poisson(params.d, params.gamma)
                .map_or_else(|_| vec![OracleValue::Unknown; params.d], |f| f_vector_oracles(params.d, f));
            mc_rows(&mut out, &label, &r, &oracles);
        }
        Err(e) => out.push(Row::error(&label, "f", &e)),
    }
    out
}

pub fn poisson_t(params: &PoissonParams, a: f64, b: f64, replicates: usize, seed: u64, symmetric: bool) -> Outcome {
    let label = format!("d={};gamma={};c={};a={a};b={b}", params.d, params.gamma, params.c);
    let (p, g, c) = (params.d, params.gamma, params.c);
    let mut out = Outcome::default();
    let result = if symmetric {
        estimate_t_symmetric(params, a, b, replicates, seed)
    } else {
        estimate_t(params, a, b, replicates, seed)
    };
    let oracle = if symmetric { expected_t_symmetric(p, g, c, a, b) } else { expected_t(p, g, c, a, b) };
    match result {
        Ok(r) => mc_rows(&mut out, &label, &r, &[oracle_of(oracle)]),
        Err(e) => out.push(Row::error(&label, "T", &e)),
    }
    out
}

pub fn poisson_volume(params: &PoissonParams, replicates: usize, seed: u64) -> Outcome {
    let label = format!("d={};gamma={};c={}", params.d, params.gamma, params.c);
    let mut out = Outcome::default();
    match estimate_volume(params, replicates, seed) {
        Ok(r) => {
            let oracle = oracle_of(expected_volume_poisson(params.d, params.gamma, params.c));
            mc_rows(&mut out, &label, &r, &[oracle]);
        }
        Err(e) => out.push(Row::error(&label, "volume", &e)),
    }
    out
}

pub fn intrinsic(params: &PoissonParams, k: usize, dirs: usize, replicates: usize, seed: u64) -> Outcome {
    let label = format!("d={};gamma={};c={};k={k};dirs={dirs}", params.d, params.gamma, params.c);
    let mut out = Outcome::default();
    match estimate_intrinsic_volume(params, k, dirs, replicates, seed) {
        Ok(r) => {
            let oracle = oracle_of(expected_intrinsic_volume(params.d, params.gamma, params.c, k));
            mc_rows(&mut out, &label, &r, &[oracle]);
        }
        Err(e) => out.push(Row::error(&label, &format!("V_{k}"), &e)),
    }
    out
}

pub fn b_constant(k: usize, d: usize, outer: usize, inner: usize, seed: u64) -> Outcome {
    let label = format!("k={k};d={d};inner={inner}");
    let mut out = Outcome::default();
    match estimate_b(k, d, outer, inner, seed) {
        Ok(r) => mc_rows(&mut out, &label, &r, &[constant_b(k, d).value]),
        Err(e) => out.push(Row::error(&label, &format!("B_{k}_{d}"), &e)),
    }
    out
}

/// Mean section f-vectors along `n_grid` against the exact facet formula,
/// then the Poisson reference row against the limit f-vector.
pub fn cone_limit(d: usize, n_grid: &[usize], replicates: usize, seed: u64) -> Outcome {
    let mut out = Outcome::default();
    let (rows, tally) = match estimate_cone_section_limit(d, n_grid, replicates, seed) {
        Ok(x) => x,
        Err(e) => {
            out.push(Row::error(&format!("d={d}"), "cone_limit", &e));
            return out;
        }
    };
    out.identities.merge(&tally);
    for row in rows {
        let label = match row.n {
            Some(n) => format!("d={d};n={n}"),
            None => format!("d={d};poisson-reference"),
        };
        let oracles = match row.n {
            Some(_) => f_vector_oracles(d, row.facet_oracle),
            None => row.limit.clone(),
        };
        for (est, oracle) in row.f.iter().zip(oracles) {
            out.push(Row::statistical(&label, est, oracle, Z_PASS));
        }
    }
    out
}

/// Identity rows for one cone: Gauss-Bonnet parity, Crofton and Kubota.
pub fn conic_identity_rows(label: &str, profile: &ConicProfile, seed: u64) -> Vec<Row> {
    let mut rows = Vec::new();
    let n = profile.samples;
    let est = |id: &str, mean: f64, stderr: f64| Estimate {
        mean,
        stderr,
        n_replicates: n,
        seed,
        target_id: id.to_string(),
    };
    let even = est("gauss_bonnet_even", profile.even_sum(), profile.parity_stderr());
    rows.push(Row::statistical(label, &even, OracleValue::Finite(0.5), Z_IDENTITY));
    let odd = est("gauss_bonnet_odd", profile.odd_sum(), profile.parity_stderr());
    rows.push(Row::statistical(label, &odd, OracleValue::Finite(0.5), Z_IDENTITY));
    for k in 1..profile.h_direct.len() {
        let a = est(&format!("h_{}", k + 1), profile.h_from_v[k], profile.h_from_v_stderr[k]);
        let b = est("", profile.h_direct[k], profile.h_direct_stderr[k]);
        rows.push(Row::paired(label, &format!("crofton_h_{}", k + 1), &a, &b, Z_IDENTITY));
    }
    for k in 0..profile.w_direct.len() {
        let a = est(&format!("w_{}", k + 1), profile.w_from_v[k], profile.w_from_v_stderr[k]);
        let b = est("", profile.w_direct[k], profile.w_direct_stderr[k]);
        rows.push(Row::paired(label, &format!("kubota_w_{}", k + 1), &a, &b, Z_IDENTITY));
    }
    rows
}

pub fn conic(d: usize, n: usize, samples: usize, seed: u64) -> Outcome {
    let label = format!("d={d};n={n}");
    let mut out = Outcome::default();
    let mut rng = seeded(seed);
    let profile = sample_cone(d, n, &mut rng)
        .and_then(|s| Cone::from_sample(&s))
        .and_then(|cone| conic_profile(&cone, samples, &mut rng));
    match profile {
        Ok(p) => {
            for (k, v) in p.v.iter().enumerate() {
                let e = Estimate {
                    mean: *v,
                    stderr: p.v_stderr[k],
                    n_replicates: samples,
                    seed,
                    target_id: format!("v_{k}"),
                };
                out.push(Row::statistical(&label, &e, OracleValue::Unknown, Z_IDENTITY));
            }
            out.rows.extend(conic_identity_rows(&label, &p, seed));
        }
        Err(e) => out.push(Row::error(&label, "conic_profile", &e)),
    }
    out
}

pub fn buchta(d: usize, n: usize, k: usize, samples: usize, seed: u64) -> Outcome {
    let label = format!("d={d};n={n};k={k}");
    let mut out = Outcome::default();
    match buchta_identity_check(d, n, k, samples, seed) {
        Ok(r) => {
            out.push(Row::paired(&label, "buchta_mc", &r.lhs, &r.rhs, Z_IDENTITY));
            if let Some(l) = r.lhs_exact {
                out.push(Row::statistical(&label, &r.lhs, OracleValue::Finite(l), Z_IDENTITY));
            }
            if let Some(rx) = r.rhs_exact {
                out.push(Row::statistical(&label, &r.rhs, OracleValue::Finite(rx), Z_IDENTITY));
            }
            if let (Some(l), Some(rx)) = (r.lhs_exact, r.rhs_exact) {
                out.push(Row::exact(&label, "buchta_exact", l, rx, 1e-12 * rx.abs()));
            }
        }
        Err(e) => out.push(Row::error(&label, "buchta", &e)),
    }
    out
}

/// Distribution tests of the samplers at significance
/// [`tolerances::SIGNIFICANCE`], plus the one-dimensional non-absorption
/// curve within 3 standard errors.
pub fn sampler_tests(draws: usize, seed: u64) -> Outcome {
    let alpha = tolerances::SIGNIFICANCE;
    let mut out = Outcome::default();

    let mut rng = seeded(derive_seed(seed, 0));
    let xi0: Vec<f64> = (0..draws).map(|_| sample_halfsphere(2, &mut rng)[0]).collect();
    let t = ks_test(&xi0, |x| x.clamp(0.0, 1.0));
    out.push(Row::fit("d=2", "halfsphere_xi0_uniform", &t, draws, seed, alpha));

    let mut rng = seeded(derive_seed(seed, 1));
    let xs: Vec<f64> = (0..draws).map(|_| sample_cauchy_type(1, &mut rng)[0]).collect();
    let t = ks_test(&xs, |x| 0.5 + x.atan() / std::f64::consts::PI);
    out.push(Row::fit("d=1", "cauchy_standard", &t, draws, seed, alpha));

    out.push(annulus_count_row(draws, seed));
    for k in [1, 2] {
        out.extend(projection_row(3, k, draws, derive_seed(seed, 10 + k as u64), alpha));
    }
    for gamma in [1.0, 2.0] {
        out.extend(non_absorption_rows(gamma, 1.0, &[0.5, 1.0, 2.0], draws, derive_seed(seed, 20 + gamma as u64)));
    }
    out
}

fn annulus_count_row(draws: usize, seed: u64) -> Row {
    let label = "d=2;gamma=1;c=2;r=1";
    let params = match PoissonParams::new(2, 1.0, 2.0) {
        Ok(p) => p,
        Err(e) => return Row::error(label, "annulus_count", &e),
    };
    let mut rng = seeded(derive_seed(seed, 2));
    let mut counts = Vec::with_capacity(draws);
    for _ in 0..draws {
        match sample_poisson_annulus(&params, 1.0, f64::INFINITY, &mut rng) {
            Ok(p) => counts.push(p.len() as u64),
            Err(e) => return Row::error(label, "annulus_count", &e),
        }
    }
    let mean = params.mass_outside(1.0);
    let t = poisson_chi_square(&counts, mean);
    Row::fit(label, "annulus_count_poisson", &t, draws, seed, tolerances::SIGNIFICANCE)
        .with_note(&format!("mean={mean}"))
}

/// Counts of projected points outside the radius where the projected
/// process `Pi_{k,gamma}(c)` has mean 3.
fn projection_row(d: usize, k: usize, draws: usize, seed: u64, alpha: f64) -> Outcome {
    let (gamma, c) = (1.5, 1.0);
    let label = format!("d={d};k={k};gamma={gamma};c={c}");
    let id = format!("projection_count_k{k}");
    let mut out = Outcome::default();
    let params = match PoissonParams::new(d, gamma, c) {
        Ok(p) => p,
        Err(e) => {
            out.push(Row::error(&label, &id, &e));
            return out;
        }
    };
    let mean = 3.0;
    let coeff = match (omega(k as f64), omega(k as f64 + gamma)) {
        (Ok(a), Ok(b)) => c * a / (gamma * b),
        _ => f64::NAN,
    };
    let radius = (coeff / mean).powf(1.0 / gamma);
    let counts: Vec<conehull_core::Result<u64>> = par_replicates(seed, draws, |_, rng| {
        let (sample, _) = sample_poisson_hull(&params, rng)?;
        let mut points = sample.points;
        // Points inside the truncation radius project inside it too, so
        // only a radius below it needs the missing shell.
        if radius < sample.r_trunc {
            points.extend(sample_poisson_annulus(&params, radius, sample.r_trunc, rng)?);
        }
        let l = haar_subspace(d, k, rng);
        let projected = project_points(&points, &l)?;
        Ok(projected.iter().filter(|p| p.norm() > radius).count() as u64)
    });
    let counts: conehull_core::Result<Vec<u64>> = counts.into_iter().collect();
    match counts {
        Ok(c) => out.push(
            Row::fit(&label, &id, &poisson_chi_square(&c, mean), draws, seed, alpha)
                .with_note(&format!("radius={radius}")),
        ),
        Err(e) => out.push(Row::error(&label, &id, &e)),
    }
    out
}

fn non_absorption_rows(gamma: f64, c: f64, radii: &[f64], draws: usize, seed: u64) -> Outcome {
    let mut out = Outcome::default();
    let params = match PoissonParams::new(1, gamma, c) {
        Ok(p) => p,
        Err(e) => {
            out.push(Row::error(&format!("gamma={gamma}"), "non_absorption", &e));
            return out;
        }
    };
    let hits: Vec<conehull_core::Result<Vec<bool>>> = par_replicates(seed, draws, |_, rng| {
        let (_, hull) = sample_poisson_hull(&params, rng)?;
        radii.iter().map(|&r| Ok(!contains_point(&hull, &Point::new(vec![r]))?)).collect()
    });
    let mut accs = vec![Accumulator::default(); radii.len()];
    for h in hits {
        match h {
            Ok(v) => {
                for (acc, outside) in accs.iter_mut().zip(v) {
                    acc.push(f64::from(u8::from(outside)));
                }
            }
            Err(e) => {
                out.push(Row::error(&format!("gamma={gamma}"), "non_absorption", &e));
                return out;
            }
        }
    }
    for (acc, &r) in accs.iter().zip(radii) {
        let label = format!("d=1;gamma={gamma};c={c};r={r}");
        let est = acc.estimate(&format!("non_absorption_r{r}"), seed);
        let oracle = non_absorption_1d(gamma, c, r).map_or(OracleValue::Unknown, OracleValue::Finite);
        out.push(Row::statistical(&label, &est, oracle, Z_IDENTITY));
    }
    out
}

/// Closed-form values for one parameter set: Poisson hull functionals at
/// `(d, gamma, c)` with `T_{a,b}`, the half-sphere facet limit and the
/// limit constants in dimension `d`.
pub fn oracle_table(d: usize, gamma: f64, c: f64, a: f64, b: f64) -> conehull_core::Result<Vec<Row>> {
    PoissonParams::new(d, gamma, c)?;
    let label = format!("d={d};gamma={gamma};c={c}");
    let mut rows = Vec::new();
    let facets = expected_facets_poisson(d, gamma)?;
    for (k, o) in f_vector_oracles(d, facets).into_iter().enumerate() {
        rows.push(Row::oracle(&label, &format!("f_{k}"), o));
    }
    let t_label = format!("{label};a={a};b={b}");
    rows.push(Row::oracle(&t_label, "T", expected_t(d, gamma, c, a, b)?.value));
    rows.push(Row::oracle(&t_label, "T_sym", expected_t_symmetric(d, gamma, c, a, b)?.value));
    rows.push(Row::oracle(&label, "volume", expected_volume_poisson(d, gamma, c)?.value));
    for k in 1..=d {
        rows.push(Row::oracle(&label, &format!("V_{k}"), expected_intrinsic_volume(d, gamma, c, k)?.value));
    }
    let dim = format!("d={d}");
    let limit = OracleValue::Finite(closed_forms::limit_facets_halfsphere(d));
    rows.push(Row::oracle(&dim, "halfsphere_facets_limit", limit));
    for k in 1..=d + 1 {
        rows.push(Row::oracle(&dim, &format!("B_{k}_{d}"), constant_b(k, d).value));
    }
    for (k, o) in closed_forms::limit_f_vector(d).into_iter().enumerate() {
        rows.push(Row::oracle(&dim, &format!("limit_f_{k}"), o));
    }
    Ok(rows)
}

/// Runs one configured experiment. The caller validates the config and
/// chooses the thread pool.
pub fn execute(cfg: &ExperimentConfig) -> Outcome {
    let start = Instant::now();
    let (reps, seed) = (cfg.replicates, cfg.seed);
    let d = cfg.int("d", 0);
    let with_params = |f: &dyn Fn(&PoissonParams) -> Outcome| match poisson_params(cfg) {
        Ok(p) => f(&p),
        Err(e) => Outcome { rows: vec![Row::error(&cfg.params_label(), cfg.kind.name(), &e)], ..Default::default() },
    };
    let mut out = match cfg.kind {
        ExperimentKind::PoissonF => with_params(&|p| poisson_f(p, reps, seed)),
        ExperimentKind::PoissonT | ExperimentKind::SymmetricT => {
            let symmetric = cfg.kind == ExperimentKind::SymmetricT;
            with_params(&|p| poisson_t(p, cfg.float("a", 0.0), cfg.float("b", 0.0), reps, seed, symmetric))
        }
        ExperimentKind::PoissonVolume => with_params(&|p| poisson_volume(p, reps, seed)),
        ExperimentKind::Intrinsic => {
            with_params(&|p| intrinsic(p, cfg.int("k", 0), cfg.int("dirs", 8), reps, seed))
        }
        ExperimentKind::BConstant => b_constant(cfg.int("k", 0), d, reps, cfg.int("inner", 100), seed),
        ExperimentKind::ConeLimit => cone_limit(d, &cfg.list("n_grid"), reps, seed),
        ExperimentKind::ConicProfile => conic(d, cfg.int("n", 0), reps, seed),
        ExperimentKind::Buchta => buchta(d, cfg.int("n", 0), cfg.int("k", 0), reps, seed),
        ExperimentKind::SamplerTests => sampler_tests(cfg.int("draws", reps), seed),
    };
    if cfg.timing {
        let ms = start.elapsed().as_millis() as u64;
        for row in &mut out.rows {
            row.wall_time_ms = Some(ms);
        }
    }
    out
}
