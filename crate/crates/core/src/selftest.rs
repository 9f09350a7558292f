//! Built-in consistency checks: factorized statistics against their literal
//! oracles, and Monte Carlo null moments against the exact formulas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::covmodels::CovarianceModel;
use crate::error::Result;
use crate::sampling::{derive_seed, sample, MaskedSample};
use crate::statistics::{
    exact_null_variance, stat_general, stat_general_bruteforce, stat_toeplitz, stat_toeplitz_bruteforce, statistic,
    StatKind,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Worst discrepancy found by [`oracle_equivalence`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleReport {
    pub instances: usize,
    pub comparisons: usize,
    /// Largest `|fast - oracle| / scale`, where `scale` is the larger of the two
    /// magnitudes and the oracle evaluated on `|Y|` (the size of the summed
    /// terms, which matters when they cancel).
    pub max_rel_error: f64,
}

fn abs_sample(s: &MaskedSample) -> Result<MaskedSample> {
    MaskedSample::from_parts(s.y().mapv(f64::abs), s.mask().clone(), s.a())
}

/// Compares the factorized statistics with the brute-force oracles on
/// `instances` random masked samples with `n <= 6`, `p <= 8` and every
/// admissible bandwidth.
pub fn oracle_equivalence(instances: usize, seed: u64) -> Result<OracleReport> {
    let mut worst: f64 = 0.0;
    let mut comparisons = 0;
    for i in 0..instances {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[i as u64]));
        let n = rng.gen_range(2..=6);
        let p = rng.gen_range(2..=8);
        let a = rng.gen_range(0.2..=1.0);
        let s = sample(&CovarianceModel::identity(p)?, n, a, rng.gen())?;
        let abs = abs_sample(&s)?;
        for m in 1..p {
            let pairs = [
                (stat_general(&s, m)?.value, stat_general_bruteforce(&s, m)?.value, stat_general_bruteforce(&abs, m)?.value),
                (stat_toeplitz(&s, m)?.value, stat_toeplitz_bruteforce(&s, m)?.value, stat_toeplitz_bruteforce(&abs, m)?.value),
            ];
            for (fast, oracle, size) in pairs {
                let scale = fast.abs().max(oracle.abs()).max(size);
                if scale > 0.0 {
                    worst = worst.max((fast - oracle).abs() / scale);
                }
                comparisons += 1;
            }
        }
    }
    Ok(OracleReport {
        instances,
        comparisons,
        max_rel_error: worst,
    })
}

/// Monte Carlo mean and variance of a statistic under the null.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NullMomentReport {
    pub kind: StatKind,
    pub replications: usize,
    pub mean: f64,
    pub variance: f64,
    pub exact_variance: f64,
}

impl NullMomentReport {
    /// Mean in units of its standard error.
    pub fn mean_z(&self) -> f64 {
        self.mean / (self.variance / self.replications as f64).sqrt()
    }

    pub fn variance_ratio(&self) -> f64 {
        self.variance / self.exact_variance
    }
}

/// Values of the statistic on `replications` null samples.
pub fn null_draws(kind: StatKind, n: usize, p: usize, m: usize, a: f64, replications: usize, seed: u64) -> Result<Vec<f64>> {
    let id = CovarianceModel::identity(p)?;
    (0..replications)
        .map(|r| {
            let s = sample(&id, n, a, derive_seed(seed, &[r as u64]))?;
            Ok(statistic(kind, &s, m)?.value)
        })
        .collect()
}

/// Sample mean and unbiased sample variance.
pub fn mean_variance(values: &[f64]) -> (f64, f64) {
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0);
    (mean, var)
}

pub fn null_moments_check(
    kind: StatKind,
    n: usize,
    p: usize,
    m: usize,
    a: f64,
    replications: usize,
    seed: u64,
) -> Result<NullMomentReport> {
    let draws = null_draws(kind, n, p, m, a, replications, seed)?;
    let (mean, variance) = mean_variance(&draws);
    Ok(NullMomentReport {
        kind,
        replications,
        mean,
        variance,
        exact_variance: exact_null_variance(kind, n, p, m, a),
    })
}

/// Runs the oracle and null-moment suites.
pub fn run_selftest(seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let rep = oracle_equivalence(200, seed)?;
    out.push(CheckResult {
        name: "oracle_equivalence".into(),
        passed: rep.max_rel_error <= 1e-10,
        detail: format!(
            "{} instances, {} comparisons, max relative error {:.3e}",
            rep.instances, rep.comparisons, rep.max_rel_error
        ),
    });
    for kind in [StatKind::General, StatKind::Toeplitz] {
        let r = null_moments_check(kind, 8, 12, 3, 0.7, 20_000, derive_seed(seed, &[1]))?;
        let passed = r.mean_z().abs() <= 4.0 && (r.variance_ratio() - 1.0).abs() <= 0.06;
        out.push(CheckResult {
            name: format!("null_moments_{}", kind.as_str()),
            passed,
            detail: format!(
                "mean {:.3e} ({:+.2} SE), variance ratio to exact {:.4}",
                r.mean,
                r.mean_z(),
                r.variance_ratio()
            ),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes() {
        let checks = run_selftest(20240601).unwrap();
        for c in &checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        assert_eq!(checks.len(), 3);
    }

    #[test]
    fn mean_variance_small() {
        let (m, v) = mean_variance(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert_eq!(v, 1.0);
    }
}
