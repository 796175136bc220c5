//! Closed-form oracles: ball and sphere constants, the exact and limiting
//! facet counts of random cones, expectations of functionals of Poisson
//! hulls, the known limit constants `B_{k,d}` and simplex moments.

pub mod quadrature;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::tolerances;

/// Value of an oracle: finite, `+inf` by a divergence branch, or not known in
/// closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum OracleValue {
    Finite(f64),
    Infinite,
    Unknown,
}

impl OracleValue {
    /// The value as a float, `+inf` for [`OracleValue::Infinite`].
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            OracleValue::Finite(v) => Some(v),
            OracleValue::Infinite => Some(f64::INFINITY),
            OracleValue::Unknown => None,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            OracleValue::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, OracleValue::Infinite)
    }
}

impl std::fmt::Display for OracleValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleValue::Finite(v) => write!(f, "{v}"),
            OracleValue::Infinite => f.write_str("+inf"),
            OracleValue::Unknown => f.write_str("unknown"),
        }
    }
}

/// A closed-form value together with the formula and parameters it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Oracle {
    pub value: OracleValue,
    pub formula_id: String,
    pub params: BTreeMap<String, f64>,
}

impl Oracle {
    fn new(formula_id: &str, value: OracleValue, params: &[(&str, f64)]) -> Self {
        Self {
            value,
            formula_id: formula_id.into(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Summed term by term so that large `n` with small `k` keeps full relative
/// precision.
fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    ln_binomial(n, k).exp().round()
}

fn ln_kappa(d: f64) -> f64 {
    0.5 * d * PI.ln() - ln_gamma(0.5 * d + 1.0)
}

fn ln_omega(s: f64) -> f64 {
    2f64.ln() + 0.5 * s * PI.ln() - ln_gamma(0.5 * s)
}

/// Volume of the unit ball, `pi^(d/2) / Gamma(d/2 + 1)`, for real `d >= 0`.
pub fn kappa(d: f64) -> Result<f64> {
    if d == 0.0 {
        return Ok(1.0);
    }
    if !(d > 0.0) {
        return Err(Error::NonPositiveArgument(d));
    }
    Ok(ln_kappa(d).exp())
}

/// Surface area constant `2 pi^(s/2) / Gamma(s/2)` for real `s > 0`.
pub fn omega(s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::NonPositiveArgument(s));
    }
    Ok(ln_omega(s).exp())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParams(format!("gamma must be positive, got {gamma}")));
    }
    Ok(())
}

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParams(format!("c must be positive, got {c}")));
    }
    Ok(())
}

/// Expected facet count of the cone spanned by `n` uniform points of the
/// upper half-sphere `S^d_+`,
/// `(2 omega_d / omega_{d+1}) C(n,d) int_0^pi (1 - a/pi)^(n-d) sin^(d-1)(a) da`.
pub fn exact_facets_halfsphere(d: usize, n: usize) -> Result<f64> {
    if d == 0 || n < d {
        return Err(Error::InvalidParams(format!("need n >= d >= 1, got d={d} n={n}")));
    }
    let df = d as f64;
    let ln_c = ln_binomial(n, d);
    let integrand = |a: f64| {
        let mut log = ln_c;
        if n > d {
            log += (n - d) as f64 * (1.0 - a / PI).ln();
        }
        if d > 1 {
            log += (df - 1.0) * a.sin().ln();
        }
        log.exp()
    };
    // The mass concentrates on [0, pi d / n]; geometric breakpoints keep the
    // first panels from stepping over the peak.
    let mut breaks = vec![0.0];
    let mut x = PI / n as f64;
    while x < PI {
        breaks.push(x);
        x *= 2.0;
    }
    breaks.push(PI);
    let share = tolerances::QUADRATURE / (breaks.len() - 1) as f64;
    let integral: f64 = breaks
        .windows(2)
        .map(|w| quadrature::integrate(integrand, w[0], w[1], share))
        .sum();
    Ok(2.0 * (ln_omega(df) - ln_omega(df + 1.0)).exp() * integral)
}

/// `2^-d d! kappa_d^2`, the limit of [`exact_facets_halfsphere`] as `n` grows.
pub fn limit_facets_halfsphere(d: usize) -> f64 {
    let df = d as f64;
    (-df * 2f64.ln() + ln_factorial(d) + 2.0 * ln_kappa(df)).exp()
}

/// Expected facet count of the hull of `Pi_{d,gamma}(c)`; free of `c`.
pub fn expected_facets_poisson(d: usize, gamma: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidParams("d must be positive".into()));
    }
    check_gamma(gamma)?;
    let df = d as f64;
    let log = (2.0 / df).ln()
        + (df - 1.0) * gamma.ln()
        + 0.5 * (df - 1.0) * PI.ln()
        + ln_gamma(0.5 * (gamma * df + 1.0))
        - ln_gamma(0.5 * gamma * df)
        + df * (ln_gamma(0.5 * gamma) - ln_gamma(0.5 * (gamma + 1.0)));
    Ok(log.exp())
}

fn expected_t_value(d: usize, gamma: f64, c: f64, a: f64, b: f64) -> OracleValue {
    let df = d as f64;
    let tail = (gamma - b) * df + b - a;
    if tail <= 0.0 || gamma <= b {
        return OracleValue::Infinite;
    }
    let ln_w1 = ln_omega(gamma + 1.0);
    let exponent = (a - b + (b - gamma) * df) / gamma;
    let g = gamma - b;
    let mut log = df * c.ln() + ln_omega(df) - gamma.ln() - ln_factorial(d) - df * ln_w1
        + exponent * (c.ln() - gamma.ln() - ln_w1)
        + ln_gamma(tail / gamma)
        - b * ln_factorial(d - 1)
        + ln_gamma(0.5 * g * df + 0.5 * (b + 1.0))
        - ln_gamma(0.5 * g * df)
        + df * (ln_gamma(0.5 * g) - ln_gamma(0.5 * (gamma + 1.0)));
    for i in 1..d {
        let i = i as f64;
        log += ln_gamma(0.5 * (i + b + 1.0)) - ln_gamma(0.5 * i);
    }
    OracleValue::Finite(log.exp())
}

fn check_ab(a: f64, b: f64) -> Result<()> {
    if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParams(format!("need a, b >= 0, got a={a} b={b}")));
    }
    Ok(())
}

/// `E T_{a,b}` (sum over facets of `dist^a * Vol_{d-1}^b`) for the hull of
/// `Pi_{d,gamma}(c)`; `+inf` when `(gamma-b)d + b - a <= 0` or `gamma <= b`.
pub fn expected_t(d: usize, gamma: f64, c: f64, a: f64, b: f64) -> Result<Oracle> {
    if d == 0 {
        return Err(Error::InvalidParams("d must be positive".into()));
    }
    check_gamma(gamma)?;
    check_c(c)?;
    check_ab(a, b)?;
    Ok(Oracle::new(
        "expected_T",
        expected_t_value(d, gamma, c, a, b),
        &[("d", d as f64), ("gamma", gamma), ("c", c), ("a", a), ("b", b)],
    ))
}

/// Same as [`expected_t`] for the symmetric hull `sconv`, which has the law
/// of the plain hull at intensity `2c`.
pub fn expected_t_symmetric(d: usize, gamma: f64, c: f64, a: f64, b: f64) -> Result<Oracle> {
    check_c(c)?;
    let mut o = expected_t(d, gamma, 2.0 * c, a, b)?;
    o.formula_id = "expected_T_symmetric".into();
    o.params.insert("c".into(), c);
    Ok(o)
}

fn volume_value(d: usize, gamma: f64, c: f64) -> OracleValue {
    if gamma <= 1.0 {
        return OracleValue::Infinite;
    }
    let df = d as f64;
    let log = df / gamma * c.ln()
        - ln_factorial(d)
        - df * (1.0 + 1.0 / gamma) * 2f64.ln()
        - df / (2.0 * gamma) * PI.ln()
        + df * (gamma - 1.0) / gamma * (gamma.ln() - ln_gamma(0.5 * (gamma + 1.0)))
        + ln_gamma(1.0 + df - df / gamma)
        + df * ln_gamma(0.5 * (gamma - 1.0))
        - ln_gamma(1.0 + 0.5 * df);
    OracleValue::Finite(log.exp())
}

/// Expected volume of the hull of `Pi_{d,gamma}(c)`; `+inf` for `gamma <= 1`.
pub fn expected_volume_poisson(d: usize, gamma: f64, c: f64) -> Result<Oracle> {
    if d == 0 {
        return Err(Error::InvalidParams("d must be positive".into()));
    }
    check_gamma(gamma)?;
    check_c(c)?;
    Ok(Oracle::new(
        "expected_volume",
        volume_value(d, gamma, c),
        &[("d", d as f64), ("gamma", gamma), ("c", c)],
    ))
}

/// Expected `k`-th intrinsic volume of the hull of `Pi_{d,gamma}(c)`:
/// `C(d,k) kappa_d / (kappa_k kappa_{d-k})` times the expected volume of the
/// `k`-dimensional hull at the same `gamma` and `c`.
pub fn expected_intrinsic_volume(d: usize, gamma: f64, c: f64, k: usize) -> Result<Oracle> {
    if k == 0 || k > d {
        return Err(Error::InvalidK { k, d });
    }
    check_gamma(gamma)?;
    check_c(c)?;
    let value = match volume_value(k, gamma, c) {
        OracleValue::Finite(v) => {
            let pref = (ln_binomial(d, k) + ln_kappa(d as f64)
                - ln_kappa(k as f64)
                - ln_kappa((d - k) as f64))
            .exp();
            OracleValue::Finite(pref * v)
        }
        other => other,
    };
    Ok(Oracle::new(
        "expected_intrinsic_volume",
        value,
        &[("d", d as f64), ("gamma", gamma), ("c", c), ("k", k as f64)],
    ))
}

/// Limit constant `B_{k,d}` where known in closed form (`k = d`, `k = 2`,
/// `k = d + 1`), otherwise [`OracleValue::Unknown`].
pub fn constant_b(k: usize, d: usize) -> Oracle {
    let df = d as f64;
    let value = if k == 0 || d == 0 || k > d + 1 {
        OracleValue::Unknown
    } else if k == d + 1 {
        OracleValue::Finite(0.0)
    } else if k == d {
        OracleValue::Finite(
            ((df - 1.0) * (2.0 * PI).ln() + 2.0 * ln_gamma(0.5 * (df + 1.0))).exp(),
        )
    } else if k == 2 {
        OracleValue::Finite(0.5 * binomial(d + 1, 3) * PI * PI)
    } else {
        OracleValue::Unknown
    };
    Oracle::new("constant_B", value, &[("k", k as f64), ("d", df)])
}

/// Limits of `E f_{k-1}` for the cone spanned by `n` half-sphere points, as
/// `n` grows: `(2/k!) B_{k,d}` where known, completed by the Dehn-Sommerville
/// relation `2 f_{d-2} = d f_{d-1}` and then by the Euler relation when
/// exactly one entry remains open.
pub fn limit_f_vector(d: usize) -> Vec<OracleValue> {
    let mut f: Vec<OracleValue> = (1..=d)
        .map(|k| match constant_b(k, d).value {
            OracleValue::Finite(b) => OracleValue::Finite(2.0 / ln_factorial(k).exp() * b),
            other => other,
        })
        .collect();
    if d >= 2 {
        if let (OracleValue::Unknown, OracleValue::Finite(top)) = (f[d - 2], f[d - 1]) {
            f[d - 2] = OracleValue::Finite(0.5 * d as f64 * top);
        }
    }
    let open: Vec<usize> = (0..d).filter(|&i| f[i] == OracleValue::Unknown).collect();
    if let [i] = open[..] {
        let target = if d % 2 == 1 { 2.0 } else { 0.0 };
        let rest: f64 = (0..d)
            .filter(|&j| j != i)
            .map(|j| {
                let v = f[j].finite().expect("all other entries are finite");
                if j % 2 == 0 { v } else { -v }
            })
            .sum();
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        f[i] = OracleValue::Finite(sign * (target - rest));
    }
    f
}

/// `E Delta_{k-1}^beta(Z_1, ..., Z_k)` for iid `Z_i` on `R^{k-1}` with density
/// proportional to `(1 + |x|^2)^{-(d+gamma)/2}`, finite iff
/// `d - k + 1 - beta + gamma > 0`.
pub fn simplex_moment_betaprime(d: usize, gamma: f64, k: usize, beta: f64) -> Result<f64> {
    if k == 0 || k > d + 1 {
        return Err(Error::InvalidK { k, d });
    }
    check_gamma(gamma)?;
    let (df, kf) = (d as f64, k as f64);
    if d as f64 - kf + 1.0 - beta + gamma <= 0.0 {
        return Err(Error::InfiniteMoment);
    }
    let mut log = -beta * ln_factorial(k - 1)
        + ln_gamma(0.5 * (df + 1.0 - kf + gamma) * kf - 0.5 * (kf - 1.0) * beta)
        - ln_gamma(0.5 * (df - kf + 1.0 - beta + gamma) * kf)
        + kf * (ln_gamma(0.5 * (df + 1.0 - kf - beta + gamma))
            - ln_gamma(0.5 * (df + 1.0 - kf + gamma)));
    for i in 1..k {
        let i = i as f64;
        log += ln_gamma(0.5 * (i + beta)) - ln_gamma(0.5 * i);
    }
    Ok(log.exp())
}

/// Probability that `[R, inf)` carries no point of `Pi_{1,gamma}(c)`:
/// `exp(-c R^-gamma / (gamma omega_{gamma+1}))`.
pub fn non_absorption_1d(gamma: f64, c: f64, r: f64) -> Result<f64> {
    check_gamma(gamma)?;
    check_c(c)?;
    Ok((-c / (gamma * omega(gamma + 1.0)?) * r.powf(-gamma)).exp())
}

/// Intensity mass of `Pi_{d,gamma}(c)` outside the ball of radius `r`:
/// `c omega_d / (gamma omega_{d+gamma}) r^-gamma`.
pub fn poisson_mass_outside(d: usize, gamma: f64, c: f64, r: f64) -> f64 {
    let df = d as f64;
    c / gamma * (ln_omega(df) - ln_omega(df + gamma)).exp() * r.powf(-gamma)
}

/// Limit of `n P(|X| > r n)` for `X` Cauchy-type on `R^d`:
/// `2 Gamma((d+1)/2) / (sqrt(pi) Gamma(d/2)) / r`.
pub fn cauchy_tail_constant(d: usize) -> f64 {
    let df = d as f64;
    2.0 * (ln_gamma(0.5 * (df + 1.0)) - ln_gamma(0.5 * df)).exp() / PI.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn ball_and_sphere_constants() {
        assert!(rel(kappa(2.0).unwrap(), PI) < 1e-14);
        assert!(rel(kappa(3.0).unwrap(), 4.0 * PI / 3.0) < 1e-14);
        assert!(rel(omega(2.0).unwrap(), 2.0 * PI) < 1e-14);
        assert!(rel(omega(3.0).unwrap(), 4.0 * PI) < 1e-14);
        for s in 1..=8 {
            let s = s as f64;
            assert!(rel(omega(s).unwrap(), s * kappa(s).unwrap()) < 1e-13);
        }
        assert_eq!(omega(0.0), Err(Error::NonPositiveArgument(0.0)));
        assert!(kappa(-1.0).is_err());
    }

    #[test]
    fn halfsphere_small_cases() {
        for n in [1, 2, 5, 40, 1000] {
            let v = exact_facets_halfsphere(1, n).unwrap();
            assert!((v - 2.0).abs() < 1e-12, "n={n}: {v}");
        }
        assert!((exact_facets_halfsphere(2, 3).unwrap() - 3.0).abs() < 1e-12);
        assert!(exact_facets_halfsphere(3, 2).is_err());
        assert!((limit_facets_halfsphere(1) - 2.0).abs() < 1e-14);
        assert!(rel(limit_facets_halfsphere(2), PI * PI / 2.0) < 1e-14);
        assert!(rel(limit_facets_halfsphere(3), 4.0 * PI * PI / 3.0) < 1e-14);
    }

    #[test]
    fn halfsphere_increases_to_limit() {
        for d in [2, 3] {
            let mut prev = 0.0;
            for j in 2..=14 {
                let v = exact_facets_halfsphere(d, 1 << j).unwrap();
                assert!(v > prev, "d={d} j={j}");
                prev = v;
            }
            assert!(rel(prev, limit_facets_halfsphere(d)) < 2e-3);
        }
        let far = exact_facets_halfsphere(2, 10_000).unwrap();
        assert!((far - PI * PI / 2.0).abs() < 2e-3);
    }

    #[test]
    fn poisson_facets() {
        for d in 1..=6 {
            let binom = binomial(2 * d, d);
            assert!(rel(expected_facets_poisson(d, 2.0).unwrap(), binom) < 1e-10);
            assert!(
                rel(expected_facets_poisson(d, 1.0).unwrap(), limit_facets_halfsphere(d)) < 1e-12
            );
        }
        assert!(rel(expected_facets_poisson(2, 1.0).unwrap(), PI * PI / 2.0) < 1e-13);
    }

    #[test]
    fn t_reduces_to_facets_and_volume() {
        for d in 1..=5 {
            for gamma in [0.5, 1.0, 2.0, 3.0] {
                let facets = expected_facets_poisson(d, gamma).unwrap();
                for c in [0.1, 1.0, 10.0] {
                    let t = expected_t(d, gamma, c, 0.0, 0.0).unwrap().value.finite().unwrap();
                    assert!(rel(t, facets) < 1e-12, "d={d} gamma={gamma} c={c}");
                    let t11 = expected_t(d, gamma, c, 1.0, 1.0).unwrap().value;
                    let vol = expected_volume_poisson(d, gamma, c).unwrap().value;
                    match (t11, vol) {
                        (OracleValue::Finite(t), OracleValue::Finite(v)) => {
                            assert!(rel(t / d as f64, v) < 1e-12, "d={d} gamma={gamma}")
                        }
                        (OracleValue::Infinite, OracleValue::Infinite) => assert!(gamma <= 1.0),
                        other => panic!("{other:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn t_a_display() {
        // E T_{a,0}(conv Pi_{d,1}(c)) = 2^(1-2a) c^a (pi/2)^(d-a) Gamma(d-a) / (Gamma(1+d/2) Gamma(d/2)).
        for d in 1..=4usize {
            for a in [0.0, 0.5, 1.0] {
                if a >= d as f64 {
                    continue;
                }
                for c in [0.5f64, 1.0, 3.0] {
                    let df = d as f64;
                    let display = 2f64.powf(1.0 - 2.0 * a)
                        * c.powf(a)
                        * (PI / 2.0).powf(df - a)
                        * (ln_gamma(df - a) - ln_gamma(1.0 + df / 2.0) - ln_gamma(df / 2.0)).exp();
                    let t = expected_t(d, 1.0, c, a, 0.0).unwrap().value.finite().unwrap();
                    assert!(rel(t, display) < 1e-12, "d={d} a={a} c={c}");
                }
            }
        }
        let t = expected_t(2, 1.0, 1.7, 1.0, 0.0).unwrap().value.finite().unwrap();
        assert!(rel(t, 1.7 * PI / 4.0) < 1e-13);
    }

    #[test]
    fn t_through_simplex_moments() {
        // E T = c^d (d-1)! omega_d / (d! omega_{d+g}^d) h(1) / g
        //       * (c/(g omega_{g+1}))^e Gamma(-e), with h(1) from the moment.
        for d in 1..=4usize {
            for (gamma, a, b) in [(2.0, 0.0, 0.0), (2.0, 1.0, 1.0), (3.0, 0.5, 1.5), (1.0, 0.3, 0.2)] {
                let c: f64 = 1.3;
                let df = d as f64;
                let moment = simplex_moment_betaprime(d, gamma, d, b + 1.0).unwrap();
                let h1 = (df * (ln_omega(df + gamma) - ln_omega(1.0 + gamma))).exp() * moment;
                let e = (a - b + (b - gamma) * df) / gamma;
                let lw1 = ln_omega(gamma + 1.0);
                let log = df * c.ln() + ln_factorial(d - 1) + ln_omega(df)
                    - ln_factorial(d)
                    - df * ln_omega(df + gamma)
                    - gamma.ln()
                    + e * (c.ln() - gamma.ln() - lw1)
                    + ln_gamma(-e);
                let route = log.exp() * h1;
                let t = expected_t(d, gamma, c, a, b).unwrap().value.finite().unwrap();
                assert!(rel(t, route) < 1e-11, "d={d} gamma={gamma} a={a} b={b}");
            }
        }
    }

    #[test]
    fn volume_displays() {
        for d in 1..=5usize {
            for c in [0.5, 2.0, 7.0] {
                let v = expected_volume_poisson(d, 2.0, c).unwrap().value.finite().unwrap();
                let display = (c / 2.0).powf(d as f64 / 2.0) / ln_factorial(d).exp();
                assert!(rel(v, display) < 1e-12);
            }
        }
        let v = expected_volume_poisson(2, 2.0, 2.0).unwrap().value.finite().unwrap();
        assert!((v - 0.5).abs() < 1e-14);
        assert!(expected_volume_poisson(3, 1.0, 1.0).unwrap().value.is_infinite());
    }

    #[test]
    fn intrinsic_volumes_two_routes() {
        for d in 1..=4 {
            let a = expected_intrinsic_volume(d, 2.5, 1.5, d).unwrap().value.finite().unwrap();
            let b = expected_volume_poisson(d, 2.5, 1.5).unwrap().value.finite().unwrap();
            assert!(rel(a, b) < 1e-12);
        }
        // d=3, gamma=2, k=2: 3 kappa_3/(kappa_2 kappa_1) = 2, and E Vol_2(conv Pi_{2,2}(c)) = c/4.
        for c in [1.0, 2.0, 5.0] {
            let v = expected_intrinsic_volume(3, 2.0, c, 2).unwrap().value.finite().unwrap();
            assert!(rel(v, 2.0 * c / 4.0) < 1e-12);
        }
        // k=1 is the mean width times kappa_d d / (2 kappa_{d-1}); in d=2 it
        // is half the perimeter, E V_1 = C(2,1) kappa_2/(kappa_1^2) E Vol_1.
        let v = expected_intrinsic_volume(2, 2.0, 2.0, 1).unwrap().value.finite().unwrap();
        let e_len = expected_volume_poisson(1, 2.0, 2.0).unwrap().value.finite().unwrap();
        assert!(rel(v, 2.0 * PI / 4.0 * e_len) < 1e-12);
        assert!(expected_intrinsic_volume(3, 1.0, 1.0, 2).unwrap().value.is_infinite());
        assert!(expected_intrinsic_volume(3, 2.0, 1.0, 0).is_err());
    }

    #[test]
    fn infinity_boundary_grid() {
        for d in 1..=4usize {
            let df = d as f64;
            for gamma in [0.5, 1.0, 1.5, 2.0, 3.0] {
                for b in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0] {
                    for a in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0] {
                        let o = expected_t(d, gamma, 1.0, a, b).unwrap();
                        let diverges = (gamma - b) * df + b - a <= 0.0 || gamma <= b;
                        assert_eq!(o.value.is_infinite(), diverges, "d={d} g={gamma} a={a} b={b}");
                        let s = expected_t_symmetric(d, gamma, 1.0, a, b).unwrap();
                        assert_eq!(s.value.is_infinite(), diverges);
                    }
                }
                let v = expected_volume_poisson(d, gamma, 1.0).unwrap();
                assert_eq!(v.value.is_infinite(), gamma <= 1.0);
            }
        }
        // Exactly on the boundary (gamma - b) d + b - a = 0.
        assert!(expected_t(2, 2.0, 1.0, 4.0, 0.0).unwrap().value.is_infinite());
        assert!(expected_t(2, 2.0, 1.0, 3.99, 0.0).unwrap().value.finite().is_some());
        assert!(expected_t(2, 1.0, 1.0, 0.0, 1.0).unwrap().value.is_infinite());
        assert!(expected_volume_poisson(2, 1.0 + 1e-9, 1.0).unwrap().value.finite().is_some());
    }

    #[test]
    fn symmetric_doubles_intensity() {
        let s = expected_t_symmetric(3, 2.0, 0.7, 1.0, 1.0).unwrap().value;
        let p = expected_t(3, 2.0, 1.4, 1.0, 1.0).unwrap().value;
        assert_eq!(s, p);
        let s0 = expected_t_symmetric(3, 2.0, 0.7, 0.0, 0.0).unwrap().value.finite().unwrap();
        assert!(rel(s0, expected_facets_poisson(3, 2.0).unwrap()) < 1e-12);
    }

    #[test]
    fn b_constants_and_limit_vectors() {
        let b = |k, d| constant_b(k, d).value.finite().unwrap();
        assert!(rel(b(2, 2), PI * PI / 2.0) < 1e-14);
        assert!(rel(b(3, 3), 4.0 * PI * PI) < 1e-14);
        assert!(rel(b(2, 3), 2.0 * PI * PI) < 1e-14);
        assert_eq!(b(4, 3), 0.0);
        assert_eq!(constant_b(1, 2).value, OracleValue::Unknown);
        let f2 = limit_f_vector(2);
        assert!(rel(f2[0].finite().unwrap(), PI * PI / 2.0) < 1e-14);
        assert!(rel(f2[1].finite().unwrap(), PI * PI / 2.0) < 1e-14);
        let f3: Vec<f64> = limit_f_vector(3).iter().map(|v| v.finite().unwrap()).collect();
        let pi2 = PI * PI;
        assert!(rel(f3[0], 2.0 + 2.0 * pi2 / 3.0) < 1e-13);
        assert!(rel(f3[1], 2.0 * pi2) < 1e-14);
        assert!(rel(f3[2], 4.0 * pi2 / 3.0) < 1e-14);
        assert!((3.0 * f3[2] - 2.0 * f3[1]).abs() < 1e-12);
        assert!((f3[0] - f3[1] + f3[2] - 2.0).abs() < 1e-12);
        assert!((limit_f_vector(1)[0].finite().unwrap() - 2.0).abs() < 1e-14);
        for d in 1..=6 {
            let top = limit_f_vector(d)[d - 1].finite().unwrap();
            assert!(rel(top, limit_facets_halfsphere(d)) < 1e-12);
        }
        let f4 = limit_f_vector(4);
        assert!(f4.iter().all(|v| v.finite().is_some()));
        assert_eq!(limit_f_vector(5)[0], OracleValue::Unknown);
    }

    #[test]
    fn simplex_moments() {
        assert!((simplex_moment_betaprime(3, 2.0, 2, 0.0).unwrap() - 1.0).abs() < 1e-14);
        // d=1, k=2, gamma=1: Z_i standard Cauchy, E|Z_1 - Z_2|^b = 2^b / cos(pi b/2).
        for beta in [0.1, 0.3, 0.5, 0.8] {
            let m = simplex_moment_betaprime(1, 1.0, 2, beta).unwrap();
            assert!(rel(m, 2f64.powf(beta) / (PI * beta / 2.0).cos()) < 1e-12);
        }
        assert_eq!(simplex_moment_betaprime(1, 1.0, 2, 1.0), Err(Error::InfiniteMoment));
        assert!(simplex_moment_betaprime(1, 1.0, 2, 0.999).is_ok());
    }

    #[test]
    fn simplex_moment_by_quadrature() {
        // d=2, gamma=1.5, k=2: Z on R with density omega_{2.5}/omega_{3.5}
        // (1+x^2)^{-1.75}; E|Z_1 - Z_2|^0.7 by nested quadrature over [-L, L]
        // after the substitution x = tan(t).
        let (d, gamma, beta) = (2usize, 1.5, 0.7);
        let s = d as f64 + gamma;
        let norm = (ln_omega(s - 1.0) - ln_omega(s)).exp();
        let dens = |t: f64| norm * t.cos().powf(s - 2.0);
        let half = PI / 2.0;
        let inner = |t1: f64| {
            let x1 = t1.tan();
            quadrature::integrate(|t2| dens(t2) * (x1 - t2.tan()).abs().powf(beta), -half, t1, 1e-13)
                + quadrature::integrate(|t2| dens(t2) * (t2.tan() - x1).abs().powf(beta), t1, half, 1e-13)
        };
        let numeric = quadrature::integrate(|t1| dens(t1) * inner(t1), -half, half, 1e-8);
        let closed = simplex_moment_betaprime(d, gamma, 2, beta).unwrap();
        assert!(rel(numeric, closed) < 1e-6, "{numeric} vs {closed}");
    }

    #[test]
    fn poisson_masses() {
        assert!((poisson_mass_outside(2, 1.0, 2.0, 1.0) - 1.0).abs() < 1e-14);
        assert!((poisson_mass_outside(2, 1.0, 2.0, 2.0) - 0.5).abs() < 1e-14);
        let p = non_absorption_1d(1.0, 2.0, 1.0).unwrap();
        // omega_2 = 2 pi.
        assert!((p - (-1.0 / PI).exp()).abs() < 1e-15);
        assert!((cauchy_tail_constant(1) - 2.0 / PI).abs() < 1e-15);
    }
}
