//! The acceptance battery as named presets of checks.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};

use conehull_core::closed_forms::{
    exact_facets_halfsphere, expected_intrinsic_volume, expected_t, expected_t_symmetric,
    expected_volume_poisson, OracleValue,
};
use conehull_core::conic::{conic_profile, Cone};
use conehull_core::geometry::{convex_hull, point_in_conv_lp};
use conehull_core::rng::{derive_seed, seeded};
use conehull_core::samplers::{sample_cone, PoissonParams};
use conehull_core::{Estimate, Point};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::experiments::{self, conic_identity_rows, Outcome, Z_IDENTITY};
use crate::report::{Report, Row};

/// Replicate counts of a preset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub seed: u64,
    pub f_replicates: usize,
    pub f_replicates_d3: usize,
    pub cone_replicates: usize,
    pub b_outer: usize,
    pub b_inner: usize,
    pub functional_replicates: usize,
    pub conic_cones: usize,
    pub conic_samples: usize,
    pub buchta_samples: usize,
    pub sampler_draws: usize,
    pub lp_instances: usize,
    /// Replaces the oracle of rows whose `check/target` id matches; used to
    /// check that a wrong oracle fails the suite.
    #[serde(default)]
    pub oracle_overrides: BTreeMap<String, f64>,
}

impl Preset {
    /// The stated acceptance sizes.
    pub fn full() -> Self {
        Preset {
            name: "full".into(),
            seed: 20_240_601,
            f_replicates: 2000,
            f_replicates_d3: 1500,
            cone_replicates: 4000,
            b_outer: 4000,
            b_inner: 100,
            functional_replicates: 4000,
            conic_cones: 20,
            conic_samples: 20_000,
            buchta_samples: 10_000,
            sampler_draws: 10_000,
            lp_instances: 200,
            oracle_overrides: BTreeMap::new(),
        }
    }

    /// Smaller samples everywhere except the distribution tests and the
    /// deterministic checks.
    pub fn fast() -> Self {
        Preset {
            name: "fast".into(),
            f_replicates: 500,
            f_replicates_d3: 500,
            cone_replicates: 1000,
            b_outer: 1000,
            b_inner: 50,
            functional_replicates: 1000,
            conic_samples: 4000,
            buchta_samples: 2000,
            ..Preset::full()
        }
    }

    /// A few replicates per check; only exercises the plumbing.
    pub fn smoke() -> Self {
        Preset {
            name: "smoke".into(),
            f_replicates: 40,
            f_replicates_d3: 40,
            cone_replicates: 40,
            b_outer: 40,
            b_inner: 10,
            functional_replicates: 40,
            conic_cones: 3,
            conic_samples: 400,
            buchta_samples: 2000,
            sampler_draws: 2000,
            lp_instances: 20,
            ..Preset::full()
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "full" => Some(Preset::full()),
            "fast" => Some(Preset::fast()),
            "smoke" => Some(Preset::smoke()),
            _ => None,
        }
    }

    pub fn with_override(mut self, id: &str, oracle: f64) -> Self {
        self.oracle_overrides.insert(id.to_string(), oracle);
        self
    }

    fn seed(&self, check: &str) -> u64 {
        // FNV-1a of the check id, so reordering checks keeps every seed.
        let h = check.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3));
        derive_seed(self.seed, h)
    }

    /// Check ids and their criteria, in execution order.
    pub fn manifest(&self) -> Vec<(u8, &'static str)> {
        CHECKS.iter().map(|(c, id, _)| (*c, *id)).collect()
    }
}

type CheckFn = fn(&Preset, u64) -> Outcome;

const CHECKS: [(u8, &str, CheckFn); 21] = [
    (1, "facets_poisson_d2", |p, s| {
        let out = experiments::poisson_f(&params(2, 2.0, 1.0), p.f_replicates, s);
        literal(out, &[("f_1", 6.0)])
    }),
    (1, "facets_poisson_d3", |p, s| {
        let out = experiments::poisson_f(&params(3, 2.0, 1.0), p.f_replicates, s);
        literal(out, &[("f_2", 20.0)])
    }),
    (2, "icosahedron_f_vector", |p, s| {
        let out = experiments::poisson_f(&params(3, 2.0, 1.0), p.f_replicates_d3, s);
        literal(out, &[("f_0", 12.0), ("f_1", 30.0), ("f_2", 20.0)])
    }),
    (3, "halfsphere_exact_values", |_, _| exact_values()),
    (3, "halfsphere_mc_d2", |p, s| experiments::cone_limit(2, &[5, 10, 20, 100], p.cone_replicates, s)),
    (4, "limit_facets_poisson", |p, s| {
        let out = experiments::poisson_f(&params(2, 1.0, 2.0), p.f_replicates, s);
        literal(out, &[("f_1", PI * PI / 2.0)])
    }),
    (4, "b_2_2", |p, s| literal(experiments::b_constant(2, 2, p.b_outer, p.b_inner, s), &[("B_2_2", PI * PI / 2.0)])),
    (4, "b_3_3", |p, s| literal(experiments::b_constant(3, 3, p.b_outer, p.b_inner, s), &[("B_3_3", 4.0 * PI * PI)])),
    (4, "b_2_3", |p, s| literal(experiments::b_constant(2, 3, p.b_outer, p.b_inner, s), &[("B_2_3", 2.0 * PI * PI)])),
    (5, "volume", |p, s| {
        let out = experiments::poisson_volume(&params(2, 2.0, 2.0), p.functional_replicates, s);
        literal(out, &[("volume", 0.5)])
    }),
    (5, "t_1_0", |p, s| {
        let out = experiments::poisson_t(&params(2, 1.0, 1.0), 1.0, 0.0, p.functional_replicates, s, false);
        literal(out, &[("T_1_0", FRAC_PI_4)])
    }),
    (5, "symmetric_t_0_0", |p, s| symmetric_t(p, s, 0.0, 0.0)),
    (5, "symmetric_t_1_1", |p, s| symmetric_t(p, s, 1.0, 1.0)),
    (6, "quadrant_profile", |p, s| quadrant_profile(p.conic_samples, s)),
    (6, "random_cone_identities", |p, s| random_cone_identities(p.conic_cones, p.conic_samples, s)),
    (7, "buchta_d1", |p, s| experiments::buchta(1, 10, 1, p.buchta_samples, s)),
    (7, "buchta_d2_k1", |p, s| experiments::buchta(2, 20, 1, p.buchta_samples, s)),
    (7, "buchta_d2_k2", |p, s| experiments::buchta(2, 20, 2, p.buchta_samples, s)),
    (8, "samplers", |p, s| experiments::sampler_tests(p.sampler_draws, s)),
    (9, "extreme_points_lp", |p, s| extreme_points(p.lp_instances, s)),
    (10, "infinity_branches", |_, _| infinity_branches()),
];

/// Replaces the computed oracles of the named rows by the known values and
/// adds a row checking that the closed form reproduces each of them.
fn literal(mut out: Outcome, values: &[(&str, f64)]) -> Outcome {
    let mut extra = Vec::new();
    for row in &mut out.rows {
        if let Some(&(id, v)) = values.iter().find(|(id, _)| *id == row.target_id) {
            if let OracleValue::Finite(computed) = row.oracle {
                extra.push(Row::exact(&row.params, &format!("{id}_closed_form"), computed, v, 1e-9 * v.abs()));
            }
            *row = row.clone().with_oracle(OracleValue::Finite(v));
        }
    }
    out.rows.extend(extra);
    out
}

/// Id of the identity row, appended after every check has run.
pub const IDENTITY_CHECK: &str = "hull_identities";

fn params(d: usize, gamma: f64, c: f64) -> PoissonParams {
    PoissonParams { d, gamma, c }
}

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub criterion: u8,
    pub id: String,
    pub rows: Vec<Row>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(Row::passed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub preset: String,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn criterion_passed(&self, criterion: u8) -> Option<bool> {
        let mut checks = self.checks.iter().filter(|c| c.criterion == criterion).peekable();
        checks.peek()?;
        Some(checks.all(CheckResult::passed))
    }

    /// Flattened rows, target ids prefixed with the check id.
    pub fn to_report(&self) -> Report {
        let rows = self
            .checks
            .iter()
            .flat_map(|c| {
                c.rows.iter().map(move |r| Row { target_id: format!("{}/{}", c.id, r.target_id), ..r.clone() })
            })
            .collect();
        Report::new(rows)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(!self.all_pass())
    }
}

/// Runs every check of the preset, then the identity row over all hulls the
/// checks sampled. Runs on the current rayon pool.
pub fn verify_all(preset: &Preset) -> VerifyReport {
    let mut checks = Vec::new();
    let mut tally = conehull_core::functionals::IdentityTally::default();
    for (criterion, id, f) in CHECKS {
        let out = f(preset, preset.seed(id));
        tally.merge(&out.identities);
        checks.push(CheckResult { criterion, id: id.to_string(), rows: apply_overrides(preset, id, out.rows) });
    }
    let label = format!("hulls={}", tally.hulls);
    let rows = vec![
        Row::count_check(&label, "euler", tally.euler_failures, tally.hulls),
        Row::count_check(&label, "dehn_sommerville", tally.dehn_sommerville_failures, tally.hulls),
        Row::count_check(&label, "t00_facets", tally.t00_failures, tally.hulls),
        Row::count_check(&label, "t11_volume", tally.t11_failures, tally.t11_checked),
    ];
    let rows = apply_overrides(preset, IDENTITY_CHECK, rows);
    checks.push(CheckResult { criterion: 9, id: IDENTITY_CHECK.into(), rows });
    VerifyReport { preset: preset.name.clone(), checks }
}

fn apply_overrides(preset: &Preset, check: &str, rows: Vec<Row>) -> Vec<Row> {
    rows.into_iter()
        .map(|r| match preset.oracle_overrides.get(&format!("{check}/{}", r.target_id)) {
            Some(&o) => r.with_oracle(OracleValue::Finite(o)),
            None => r,
        })
        .collect()
}

fn symmetric_t(p: &Preset, seed: u64, a: f64, b: f64) -> Outcome {
    let mut out = experiments::poisson_t(&params(2, 2.0, 1.0), a, b, p.functional_replicates, seed, true);
    // The symmetric hull at intensity c against the plain oracle at 2c.
    if let Ok(plain) = expected_t(2, 2.0, 2.0, a, b) {
        if let Some(row) = out.rows.first_mut() {
            *row = row.clone().with_oracle(plain.value).with_note("oracle=E T at 2c");
        }
    }
    out
}

fn exact_values() -> Outcome {
    let mut out = Outcome::default();
    for n in [2, 3, 10, 1000] {
        let v = exact_facets_halfsphere(1, n);
        out.rows.push(match v {
            Ok(v) => Row::exact(&format!("d=1;n={n}"), "exact_facets", v, 2.0, 1e-12),
            Err(e) => Row::error(&format!("d=1;n={n}"), "exact_facets", &e),
        });
    }
    out.rows.push(match exact_facets_halfsphere(2, 3) {
        Ok(v) => Row::exact("d=2;n=3", "exact_facets", v, 3.0, 1e-12),
        Err(e) => Row::error("d=2;n=3", "exact_facets", &e),
    });
    out
}

/// The quarter plane: `v = (1/4, 1/2, 1/4)`.
fn quadrant_profile(samples: usize, seed: u64) -> Outcome {
    let mut out = Outcome::default();
    let s = 0.5f64.sqrt();
    // Rotated so that both generators have a positive first coordinate.
    let gens = vec![Point::new(vec![s, s]), Point::new(vec![s, -s])];
    let profile = Cone::from_generators(gens).and_then(|c| conic_profile(&c, samples, &mut seeded(seed)));
    match profile {
        Ok(p) => {
            for (k, target) in [0.25, 0.5, 0.25].into_iter().enumerate() {
                let e = Estimate {
                    mean: p.v[k],
                    stderr: p.v_stderr[k],
                    n_replicates: samples,
                    seed,
                    target_id: format!("v_{k}"),
                };
                out.rows.push(Row::statistical("quadrant", &e, OracleValue::Finite(target), Z_IDENTITY));
            }
            out.rows.extend(conic_identity_rows("quadrant", &p, seed));
        }
        Err(e) => out.rows.push(Row::error("quadrant", "profile", &e)),
    }
    out
}

/// Identity rows for random cones with `d` cycling through 1, 2, 3 and
/// between `d + 1` and `d + 4` generators.
fn random_cone_identities(cones: usize, samples: usize, seed: u64) -> Outcome {
    let mut out = Outcome::default();
    for i in 0..cones {
        let d = 1 + i % 3;
        let n = d + 1 + (i / 3) % 4;
        let mut rng = seeded(derive_seed(seed, i as u64));
        let label = format!("cone={i};d={d};n={n}");
        let profile = sample_cone(d, n, &mut rng)
            .and_then(|s| Cone::from_sample(&s))
            .and_then(|c| conic_profile(&c, samples, &mut rng));
        match profile {
            Ok(p) => out.rows.extend(
                conic_identity_rows(&label, &p, seed)
                    .into_iter()
                    .map(|r| Row { target_id: format!("cone{i}_{}", r.target_id), ..r }),
            ),
            Err(e) => out.rows.push(Row::error(&label, "profile", &e)),
        }
    }
    out
}

/// Hull vertices against points that are not in the hull of the others,
/// decided by linear programming, on random clouds in `d = 2, 3, 4`.
fn extreme_points(instances: usize, seed: u64) -> Outcome {
    let mut out = Outcome::default();
    let mut rng = seeded(seed);
    let mut failures = 0;
    for i in 0..instances {
        let d = 2 + i % 3;
        let n = rng.random_range(d + 2..=60);
        let gaussian = i % 2 == 0;
        let pts: Vec<Point> = (0..n)
            .map(|_| {
                Point::new(
                    (0..d)
                        .map(|_| {
                            if gaussian {
                                rng.sample::<f64, _>(rand_distr::StandardNormal)
                            } else {
                                rng.random_range(-1.0..1.0)
                            }
                        })
                        .collect(),
                )
            })
            .collect();
        let Ok(hull) = convex_hull(&pts, d) else {
            failures += 1;
            continue;
        };
        let extreme: Vec<usize> = (0..n)
            .filter(|&j| {
                let rest: Vec<Point> = pts.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, p)| p.clone()).collect();
                !point_in_conv_lp(&pts[j], &rest)
            })
            .collect();
        failures += usize::from(hull.input_indices() != extreme.as_slice());
    }
    out.rows.push(Row::count_check(&format!("instances={instances}"), "vertices_vs_lp", failures, instances));
    out
}

/// `expected_t` and `expected_volume_poisson` are `+inf` exactly where the
/// finiteness conditions fail, on a grid that hits the boundaries exactly.
fn infinity_branches() -> Outcome {
    let mut out = Outcome::default();
    let gammas: Vec<f64> = (1..=16).map(|i| f64::from(i) * 0.25).collect();
    let exps = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0];
    let mut checked = 0;
    let mut failures = 0;
    for d in 1..=5usize {
        for &g in &gammas {
            for &a in &exps {
                for &b in &exps {
                    let infinite = (g - b) * d as f64 + b - a <= 0.0 || g <= b;
                    for oracle in [expected_t(d, g, 1.3, a, b), expected_t_symmetric(d, g, 1.3, a, b)] {
                        checked += 1;
                        let ok = match oracle.map(|o| o.value) {
                            Ok(OracleValue::Infinite) => infinite,
                            Ok(OracleValue::Finite(v)) => !infinite && v.is_finite() && v > 0.0,
                            _ => false,
                        };
                        failures += usize::from(!ok);
                    }
                }
            }
            for oracle in [expected_volume_poisson(d, g, 0.7), expected_intrinsic_volume(d, g, 0.7, d)] {
                checked += 1;
                let ok = match oracle.map(|o| o.value) {
                    Ok(OracleValue::Infinite) => g <= 1.0,
                    Ok(OracleValue::Finite(v)) => g > 1.0 && v.is_finite() && v > 0.0,
                    _ => false,
                };
                failures += usize::from(!ok);
            }
        }
    }
    out.rows.push(Row::count_check("d=1..5;gamma=0.25..4", "infinite_iff_condition", failures, checked));
    // The boundary itself is infinite and the value blows up approaching it.
    let near = expected_t(2, 1.0 + 1e-6, 1.0, 2.0, 0.0).map(|o| o.value);
    let blows_up = matches!(near, Ok(OracleValue::Finite(v)) if v > 1e4);
    out.rows.push(Row::count_check("d=2;a=2;b=0", "diverges_at_boundary", usize::from(!blows_up), 1));
    out
}
