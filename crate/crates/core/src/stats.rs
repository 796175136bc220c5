//! Estimator state and goodness-of-fit tests.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Monte Carlo estimate of a scalar target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_replicates: usize,
    pub seed: u64,
    pub target_id: String,
}

impl Estimate {
    /// A deterministic value with zero standard error.
    pub fn exact(target_id: &str, value: f64, seed: u64) -> Self {
        Self { mean: value, stderr: 0.0, n_replicates: 1, seed, target_id: target_id.into() }
    }

    /// `(mean - oracle) / stderr`. A zero standard error gives `0` on an
    /// exact match and an infinite score otherwise.
    pub fn z_score(&self, oracle: f64) -> f64 {
        let diff = self.mean - oracle;
        if self.stderr > 0.0 {
            diff / self.stderr
        } else if diff.abs() <= 1e-12 * oracle.abs().max(1.0) {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }

    /// z-score of the difference of two independent estimates.
    pub fn z_difference(&self, other: &Estimate) -> f64 {
        let se = self.stderr.hypot(other.stderr);
        let diff = self.mean - other.mean;
        if se > 0.0 {
            diff / se
        } else if diff.abs() <= 1e-12 * self.mean.abs().max(1.0) {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.mean *= factor;
        self.stderr *= factor.abs();
        self
    }
}

/// Running count, mean and centered sum of squares (Welford), mergeable.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Accumulator {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Accumulator) {
        if other.count == 0 {
            return;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        self.m2 += other.m2 + delta * delta * (self.count * other.count) as f64 / n as f64;
        self.mean += delta * other.count as f64 / n as f64;
        self.count = n;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }

    pub fn estimate(&self, target_id: &str, seed: u64) -> Estimate {
        Estimate {
            mean: self.mean,
            stderr: self.stderr(),
            n_replicates: self.count,
            seed,
            target_id: target_id.into(),
        }
    }
}

impl FromIterator<f64> for Accumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Accumulator::default();
        iter.into_iter().for_each(|x| acc.push(x));
        acc
    }
}

/// Outcome of a goodness-of-fit test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitTest {
    pub statistic: f64,
    pub p_value: f64,
}

impl FitTest {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value > significance
    }
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF, with the
/// asymptotic Kolmogorov distribution and Stephens' small-sample correction.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> FitTest {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    FitTest { statistic: d, p_value: kolmogorov_survival(lambda) }
}

/// `P(K > lambda)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Pearson chi-square test; `fitted` parameters reduce the degrees of freedom.
pub fn chi_square_test(observed: &[f64], expected: &[f64], fitted: usize) -> FitTest {
    assert_eq!(observed.len(), expected.len());
    let statistic: f64 = observed
        .iter()
        .zip(expected)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    let df = (observed.len() - 1 - fitted).max(1) as f64;
    let dist = ChiSquared::new(df).expect("positive degrees of freedom");
    FitTest { statistic, p_value: 1.0 - dist.cdf(statistic) }
}

/// Chi-square fit of integer counts to Poisson(`mean`), pooling the upper tail
/// so that every cell expects at least five observations.
pub fn poisson_chi_square(counts: &[u64], mean: f64) -> FitTest {
    let total = counts.len() as f64;
    let mut expected = Vec::new();
    let mut pmf = (-mean).exp();
    let mut cumulative = 0.0;
    let mut k = 0u64;
    loop {
        let tail = 1.0 - cumulative - pmf;
        if total * tail < 5.0 || total * pmf < 5.0 && k > 0 {
            expected.push(total * (1.0 - cumulative));
            break;
        }
        expected.push(total * pmf);
        cumulative += pmf;
        k += 1;
        pmf *= mean / k as f64;
    }
    let last = expected.len() - 1;
    let mut observed = vec![0.0; expected.len()];
    for &c in counts {
        observed[(c as usize).min(last)] += 1.0;
    }
    chi_square_test(&observed, &expected, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 4.0, 2.5, -3.0, 7.25, 0.5];
        let acc: Accumulator = xs.iter().copied().collect();
        let mean = xs.iter().sum::<f64>() / 6.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 5.0;
        assert!((acc.mean() - mean).abs() < 1e-14);
        assert!((acc.variance() - var).abs() < 1e-13);
        let mut left: Accumulator = xs[..2].iter().copied().collect();
        let right: Accumulator = xs[2..].iter().copied().collect();
        left.merge(&right);
        assert!((left.variance() - var).abs() < 1e-13);
    }

    #[test]
    fn kolmogorov_reference_points() {
        // Standard critical values: P(K > 1.3581) = 0.05, P(K > 1.6276) = 0.01.
        assert!((kolmogorov_survival(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_survival(1.6276) - 0.01).abs() < 1e-4);
    }

    #[test]
    fn ks_flags_wrong_law() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_test(&xs, |x| x).p_value > 0.99);
        assert!(ks_test(&xs, |x| x * x).p_value < 1e-6);
    }

    #[test]
    fn z_scores() {
        let e = Estimate { mean: 1.0, stderr: 0.5, n_replicates: 4, seed: 0, target_id: "t".into() };
        assert_eq!(e.z_score(0.0), 2.0);
        assert_eq!(Estimate::exact("t", 2.0, 0).z_score(2.0), 0.0);
        assert!(Estimate::exact("t", 2.0, 0).z_score(3.0).is_infinite());
    }
}
