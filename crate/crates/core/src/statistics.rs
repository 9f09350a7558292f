//! The two order-2 U-statistics, their literal-loop oracles, and their
//! first two moments.
//!
//! Both statistics sum `Y_{k,.} Y_{l,.}` cross products over ordered pairs of
//! distinct observations `k != l`. Since the summand factorizes as
//! `z_k z_l`, `sum_{k != l} z_k z_l = (sum_k z_k)^2 - sum_k z_k^2`, which turns
//! the O(n^2) pair loop into one pass over the observations.
//!
//! Bandwidth convention: the general statistic uses the `m` off-diagonals
//! `1 <= j - i <= m`, the same lags `1..=m` the Toeplitz statistic uses.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::covmodels::CovarianceModel;
use crate::error::{Error, Result};
use crate::sampling::MaskedSample;
use crate::summation::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatKind {
    General,
    Toeplitz,
}

impl StatKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StatKind::General => "general",
            StatKind::Toeplitz => "toeplitz",
        }
    }
}

impl std::str::FromStr for StatKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "general" => Ok(StatKind::General),
            "toeplitz" => Ok(StatKind::Toeplitz),
            other => Err(Error::invalid("kind", format!("expected general|toeplitz, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatisticResult {
    pub value: f64,
    /// `value / sd` with the asymptotic null standard deviation
    /// `a^2 / (n sqrt p)` (general) or `a^2 / (n (p - m))` (Toeplitz).
    pub standardized: f64,
    pub n: usize,
    pub p: usize,
    pub m: usize,
    pub a: f64,
    pub kind: StatKind,
}

impl StatisticResult {
    fn new(kind: StatKind, value: f64, n: usize, p: usize, m: usize, a: f64) -> Self {
        let scale = match kind {
            StatKind::General => n as f64 * (p as f64).sqrt() / (a * a),
            StatKind::Toeplitz => n as f64 * (p - m) as f64 / (a * a),
        };
        Self {
            value,
            standardized: value * scale,
            n,
            p,
            m,
            a,
            kind,
        }
    }
}

fn check_sizes(n: usize, p: usize, m: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid("n", format!("need at least 2 observations, got {n}")));
    }
    if m < 1 {
        return Err(Error::invalid("m", "bandwidth must be at least 1"));
    }
    if m >= p {
        return Err(Error::BandwidthExceedsDimension { m, p });
    }
    Ok(())
}

/// `G_d = sum_{k != l} sum_i Y_{k,i} Y_{k,i+d} Y_{l,i} Y_{l,i+d}` for
/// `d = 1..=max_lag`, returned at index `d - 1`.
///
/// Per-pair sums `S = sum_k z_k` and `Q = sum_k z_k^2` are accumulated row by
/// row into `max_lag x p` buffers, then `S^2 - Q` is summed with compensation.
pub fn general_lag_totals(y: ArrayView2<f64>, max_lag: usize) -> Vec<f64> {
    let (n, p) = y.dim();
    let max_lag = max_lag.min(p.saturating_sub(1));
    let mut s = vec![0.0; max_lag * p];
    let mut q = vec![0.0; max_lag * p];
    let mut row = vec![0.0; p];
    for k in 0..n {
        for (dst, src) in row.iter_mut().zip(y.row(k).iter()) {
            *dst = *src;
        }
        for d in 1..=max_lag {
            let len = p - d;
            let sd = &mut s[(d - 1) * p..(d - 1) * p + len];
            let qd = &mut q[(d - 1) * p..(d - 1) * p + len];
            for (((si, qi), &lo), &hi) in sd.iter_mut().zip(qd.iter_mut()).zip(&row[..len]).zip(&row[d..]) {
                let z = lo * hi;
                *si += z;
                *qi += z * z;
            }
        }
    }
    (1..=max_lag)
        .map(|d| {
            let base = (d - 1) * p;
            (0..p - d)
                .map(|i| {
                    let si = s[base + i];
                    si * si - q[base + i]
                })
                .collect::<CompensatedSum>()
                .value()
        })
        .collect()
}

fn general_from_totals(totals: &[f64], n: usize, p: usize, m: usize, a: f64) -> StatisticResult {
    let sum = totals[..m].iter().copied().collect::<CompensatedSum>().value();
    let norm = n as f64 * (n - 1) as f64 * p as f64 * (2.0 * m as f64).sqrt();
    StatisticResult::new(StatKind::General, sum / norm, n, p, m, a)
}

/// `D = 1/(n(n-1) p sqrt(2m)) sum_{k != l} sum_{1 <= j-i <= m} Y_ki Y_kj Y_li Y_lj`,
/// computed in O(n p m).
pub fn stat_general(sample: &MaskedSample, m: usize) -> Result<StatisticResult> {
    let (n, p) = (sample.n(), sample.p());
    check_sizes(n, p, m)?;
    let totals = general_lag_totals(sample.y().view(), m);
    Ok(general_from_totals(&totals, n, p, m, sample.a()))
}

/// General statistic at several bandwidths from one pass over the data.
/// Results follow the order of `ms`.
pub fn stat_general_levels(sample: &MaskedSample, ms: &[usize]) -> Result<Vec<StatisticResult>> {
    let (n, p) = (sample.n(), sample.p());
    for &m in ms {
        check_sizes(n, p, m)?;
    }
    let max_m = ms.iter().copied().max().unwrap_or(0);
    let totals = general_lag_totals(sample.y().view(), max_m);
    Ok(ms
        .iter()
        .map(|&m| general_from_totals(&totals, n, p, m, sample.a()))
        .collect())
}

/// Literal quadruple loop for [`stat_general`]; O(n^2 p m).
pub fn stat_general_bruteforce(sample: &MaskedSample, m: usize) -> Result<StatisticResult> {
    let (n, p) = (sample.n(), sample.p());
    check_sizes(n, p, m)?;
    let y = sample.y();
    let mut total = 0.0;
    for k in 0..n {
        for l in 0..n {
            if k == l {
                continue;
            }
            for i in 0..p {
                for j in (i + 1)..p {
                    if j - i <= m {
                        total += y[[k, i]] * y[[k, j]] * y[[l, i]] * y[[l, j]];
                    }
                }
            }
        }
    }
    let norm = n as f64 * (n - 1) as f64 * p as f64 * (2.0 * m as f64).sqrt();
    Ok(StatisticResult::new(StatKind::General, total / norm, n, p, m, sample.a()))
}

/// For each bandwidth `m` in `ms`, `sum_{j=1}^{m} [(sum_k s_kj)^2 - sum_k s_kj^2]`
/// with diagonal sums `s_kj = sum_{i=m+1}^{p} Y_{k,i} Y_{k,i-j}` (1-based).
///
/// A single descending sweep over `i` per row serves every bandwidth: the
/// running lag sums are snapshotted whenever `i` reaches a level's lower
/// limit. Cost O(n p max(ms)).
pub fn toeplitz_level_totals(y: ArrayView2<f64>, ms: &[usize]) -> Vec<f64> {
    let (n, p) = y.dim();
    if ms.is_empty() {
        return Vec::new();
    }
    // levels by decreasing m; a level with bandwidth m includes 0-based i >= m
    let mut order: Vec<usize> = (0..ms.len()).collect();
    order.sort_by(|&x, &y| ms[y].cmp(&ms[x]));
    let max_m = ms[order[0]];
    let min_m = ms[order[order.len() - 1]];

    let mut first = vec![vec![0.0; max_m + 1]; ms.len()];
    let mut second = vec![vec![0.0; max_m + 1]; ms.len()];
    let mut acc = vec![0.0; max_m + 1];
    let mut row = vec![0.0; p];
    for k in 0..n {
        for (dst, src) in row.iter_mut().zip(y.row(k).iter()) {
            *dst = *src;
        }
        acc.iter_mut().for_each(|x| *x = 0.0);
        let mut next = 0;
        let mut i = p;
        while i > min_m {
            i -= 1;
            let yi = row[i];
            let top = max_m.min(i);
            for j in 1..=top {
                acc[j] += yi * row[i - j];
            }
            while next < order.len() && ms[order[next]] == i {
                let lvl = order[next];
                let m = ms[lvl];
                for j in 1..=m {
                    let sj = acc[j];
                    first[lvl][j] += sj;
                    second[lvl][j] += sj * sj;
                }
                next += 1;
            }
        }
    }
    ms.iter()
        .enumerate()
        .map(|(lvl, &m)| {
            (1..=m)
                .map(|j| first[lvl][j] * first[lvl][j] - second[lvl][j])
                .collect::<CompensatedSum>()
                .value()
        })
        .collect()
}

fn toeplitz_from_total(total: f64, n: usize, p: usize, m: usize, a: f64) -> StatisticResult {
    let pm = (p - m) as f64;
    let norm = n as f64 * (n - 1) as f64 * pm * pm * (2.0 * m as f64).sqrt();
    StatisticResult::new(StatKind::Toeplitz, total / norm, n, p, m, a)
}

/// `A = 1/(n(n-1)(p-m)^2 sqrt(2m)) sum_{k != l} sum_{j=1}^{m} s_kj s_lj`.
pub fn stat_toeplitz(sample: &MaskedSample, m: usize) -> Result<StatisticResult> {
    let (n, p) = (sample.n(), sample.p());
    check_sizes(n, p, m)?;
    let total = toeplitz_level_totals(sample.y().view(), &[m])[0];
    Ok(toeplitz_from_total(total, n, p, m, sample.a()))
}

/// Toeplitz statistic at several bandwidths; results follow the order of `ms`.
pub fn stat_toeplitz_levels(sample: &MaskedSample, ms: &[usize]) -> Result<Vec<StatisticResult>> {
    let (n, p) = (sample.n(), sample.p());
    for &m in ms {
        check_sizes(n, p, m)?;
    }
    let totals = toeplitz_level_totals(sample.y().view(), ms);
    Ok(ms
        .iter()
        .zip(totals)
        .map(|(&m, t)| toeplitz_from_total(t, n, p, m, sample.a()))
        .collect())
}

/// Literal quintuple loop for [`stat_toeplitz`]; O(n^2 m p^2).
pub fn stat_toeplitz_bruteforce(sample: &MaskedSample, m: usize) -> Result<StatisticResult> {
    let (n, p) = (sample.n(), sample.p());
    check_sizes(n, p, m)?;
    let y = sample.y();
    let mut total = 0.0;
    for k in 0..n {
        for l in 0..n {
            if k == l {
                continue;
            }
            for j in 1..=m {
                for i1 in m..p {
                    for i2 in m..p {
                        total += y[[k, i1]] * y[[k, i1 - j]] * y[[l, i2]] * y[[l, i2 - j]];
                    }
                }
            }
        }
    }
    Ok(toeplitz_from_total(total, n, p, m, sample.a()))
}

pub fn statistic(kind: StatKind, sample: &MaskedSample, m: usize) -> Result<StatisticResult> {
    match kind {
        StatKind::General => stat_general(sample, m),
        StatKind::Toeplitz => stat_toeplitz(sample, m),
    }
}

pub fn statistic_levels(kind: StatKind, sample: &MaskedSample, ms: &[usize]) -> Result<Vec<StatisticResult>> {
    match kind {
        StatKind::General => stat_general_levels(sample, ms),
        StatKind::Toeplitz => stat_toeplitz_levels(sample, ms),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NullMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Null mean and variance: `a^4 / (n(n-1)p)` for the general statistic,
/// `a^4 / (n(n-1)(p-m)^2)` for the Toeplitz one.
pub fn null_moments(kind: StatKind, n: usize, p: usize, m: usize, a: f64) -> NullMoments {
    let a4 = a.powi(4);
    let nn = n as f64 * (n as f64 - 1.0);
    let variance = match kind {
        StatKind::General => a4 / (nn * p as f64),
        StatKind::Toeplitz => {
            let pm = p as f64 - m as f64;
            a4 / (nn * pm * pm)
        }
    };
    NullMoments {
        mean: 0.0,
        variance,
    }
}

/// Exact finite-sample null variance. For the Toeplitz statistic this equals
/// [`null_moments`]; the general one counts the `m p - m(m+1)/2` coordinate
/// pairs in the band, giving `a^4 (1 - (m+1)/(2p)) / (n(n-1)p)`.
pub fn exact_null_variance(kind: StatKind, n: usize, p: usize, m: usize, a: f64) -> f64 {
    match kind {
        StatKind::General => {
            let (pf, mf) = (p as f64, m as f64);
            let pairs = mf * pf - mf * (mf + 1.0) / 2.0;
            a.powi(4) * pairs / (n as f64 * (n as f64 - 1.0) * pf * pf * mf)
        }
        StatKind::Toeplitz => null_moments(kind, n, p, m, a).variance,
    }
}

/// `a^4/(p sqrt(2m)) sum_{1 <= j-i <= m} sigma_ij^2`.
pub fn alt_mean_general(model: &CovarianceModel, m: usize, a: f64, p: usize) -> Result<f64> {
    if model.dim() != p {
        return Err(Error::DimensionMismatch {
            what: "model dimension vs p",
            expected: p,
            got: model.dim(),
        });
    }
    if m < 1 {
        return Err(Error::invalid("m", "bandwidth must be at least 1"));
    }
    let s = model.entries();
    let mut acc = CompensatedSum::new();
    for i in 0..p {
        for j in (i + 1)..p.min(i + m + 1) {
            acc.add(s[[i, j]] * s[[i, j]]);
        }
    }
    Ok(a.powi(4) / (p as f64 * (2.0 * m as f64).sqrt()) * acc.value())
}

/// `a^4/sqrt(2m) sum_{j=1}^{m} sigma_j^2`.
pub fn alt_mean_toeplitz(model: &CovarianceModel, m: usize, a: f64) -> Result<f64> {
    let row = model.toeplitz_row()?;
    if m < 1 {
        return Err(Error::invalid("m", "bandwidth must be at least 1"));
    }
    if m >= row.len() {
        return Err(Error::BandwidthExceedsDimension { m, p: row.len() });
    }
    let sum = row[1..=m].iter().map(|s| s * s).collect::<CompensatedSum>().value();
    Ok(a.powi(4) / (2.0 * m as f64).sqrt() * sum)
}

pub fn alt_mean(kind: StatKind, model: &CovarianceModel, m: usize, a: f64) -> Result<f64> {
    match kind {
        StatKind::General => alt_mean_general(model, m, a, model.dim()),
        StatKind::Toeplitz => alt_mean_toeplitz(model, m, a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::{array, Array2};
    use proptest::prelude::*;

    fn full(y: Array2<f64>) -> MaskedSample {
        MaskedSample::fully_observed(y)
    }

    fn rel_close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol * x.abs().max(y.abs()).max(1e-300)
    }

    #[test]
    fn general_worked_example() {
        let s = full(array![[1.0, 1.0, 0.0], [1.0, -1.0, 1.0]]);
        let f = stat_general(&s, 2).unwrap();
        let b = stat_general_bruteforce(&s, 2).unwrap();
        assert_relative_eq!(f.value, -1.0 / 6.0, max_relative = 1e-14);
        assert_relative_eq!(b.value, -1.0 / 6.0, max_relative = 1e-14);
    }

    #[test]
    fn zero_row_gives_zero() {
        let s = full(array![[0.0, 0.0, 0.0, 0.0], [1.0, -2.0, 0.5, 3.0]]);
        assert_eq!(stat_general(&s, 3).unwrap().value, 0.0);
        assert_eq!(stat_toeplitz(&s, 2).unwrap().value, 0.0);
    }

    #[test]
    fn bandwidth_one_uses_adjacent_pairs_only() {
        // only (1,2) and (2,3) enter; (1,3) would add 2*1*1 if it did
        let s = full(array![[1.0, 0.0, 1.0], [1.0, 0.0, 1.0]]);
        assert_eq!(stat_general(&s, 1).unwrap().value, 0.0);
        assert_eq!(stat_general_bruteforce(&s, 1).unwrap().value, 0.0);
        assert!(stat_general(&s, 2).unwrap().value > 0.0);
    }

    #[test]
    fn toeplitz_worked_example() {
        let s = full(array![[1.0, 1.0, 1.0], [1.0, -1.0, 1.0]]);
        let f = stat_toeplitz(&s, 1).unwrap();
        let b = stat_toeplitz_bruteforce(&s, 1).unwrap();
        assert_relative_eq!(f.value, -std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-14);
        assert_relative_eq!(b.value, -std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-14);
    }

    #[test]
    fn toeplitz_identical_rows_positive() {
        let r = [0.5, -1.0, 2.0, 1.5, -0.25];
        let y = Array2::from_shape_fn((2, 5), |(_, i)| r[i]);
        let (p, m) = (5usize, 2usize);
        let s: Vec<f64> = (1..=m)
            .map(|j| (m..p).map(|i| r[i] * r[i - j]).sum())
            .collect();
        let want = 2.0 * s.iter().map(|x| x * x).sum::<f64>()
            / (2.0 * ((p - m) as f64).powi(2) * (2.0 * m as f64).sqrt());
        let got = stat_toeplitz(&full(y), m).unwrap().value;
        assert!(got > 0.0);
        assert_relative_eq!(got, want, max_relative = 1e-13);
    }

    #[test]
    fn size_errors() {
        let s = full(Array2::ones((3, 4)));
        assert!(matches!(
            stat_general(&s, 4),
            Err(Error::BandwidthExceedsDimension { m: 4, p: 4 })
        ));
        assert!(stat_general(&s, 0).is_err());
        assert!(stat_toeplitz(&s, 4).is_err());
        let one = full(Array2::ones((1, 4)));
        assert!(stat_general(&one, 1).is_err());
        assert!(stat_toeplitz_bruteforce(&one, 1).is_err());
    }

    #[test]
    fn standardization() {
        let y = array![[1.0, 2.0, -1.0, 0.5], [0.3, -0.7, 1.1, 2.0], [1.0, 1.0, 1.0, -1.0]];
        let s = full(y).with_a(0.5).unwrap();
        let g = stat_general(&s, 2).unwrap();
        assert_relative_eq!(g.standardized, g.value * 3.0 * 2.0 / 0.25, max_relative = 1e-14);
        let t = stat_toeplitz(&s, 1).unwrap();
        assert_relative_eq!(t.standardized, t.value * 3.0 * 3.0 / 0.25, max_relative = 1e-14);
    }

    #[test]
    fn levels_agree_with_single_bandwidth() {
        let y = Array2::from_shape_fn((7, 20), |(k, i)| ((k * 31 + i * 17) % 11) as f64 - 5.0);
        let s = full(y);
        let ms = [8, 2, 4, 1];
        for (r, &m) in stat_general_levels(&s, &ms).unwrap().iter().zip(&ms) {
            assert!(rel_close(r.value, stat_general(&s, m).unwrap().value, 1e-13));
        }
        for (r, &m) in stat_toeplitz_levels(&s, &ms).unwrap().iter().zip(&ms) {
            assert_eq!(r.m, m);
            assert!(rel_close(r.value, stat_toeplitz_bruteforce(&s, m).unwrap().value, 1e-12));
        }
    }

    #[test]
    fn null_moment_arithmetic() {
        let g = null_moments(StatKind::General, 20, 50, 8, 0.7);
        assert_eq!(g.mean, 0.0);
        assert_relative_eq!(g.variance, 1.2637e-5, max_relative = 1e-4);
        assert_relative_eq!(
            null_moments(StatKind::General, 9, 13, 3, 1.0).variance,
            1.0 / (9.0 * 8.0 * 13.0),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            null_moments(StatKind::Toeplitz, 11, 101, 1, 1.0).variance,
            1.0 / (11.0 * 10.0 * 100.0 * 100.0),
            max_relative = 1e-4
        );
    }

    #[test]
    fn exact_general_variance_counts_pairs() {
        let v = exact_null_variance(StatKind::General, 20, 50, 8, 0.7);
        let asymptotic = null_moments(StatKind::General, 20, 50, 8, 0.7).variance;
        assert_relative_eq!(v / asymptotic, 1.0 - 9.0 / 100.0, max_relative = 1e-14);
    }

    #[test]
    fn alt_mean_arithmetic() {
        let m = array![[1.0, 0.1, 0.0], [0.1, 1.0, 0.1], [0.0, 0.1, 1.0]];
        let model = CovarianceModel::infer(m).unwrap();
        let v = alt_mean_general(&model, 2, 0.5, 3).unwrap();
        assert_relative_eq!(v, 0.0625 * 0.02 / (3.0 * 2.0), max_relative = 1e-14);
        assert_relative_eq!(v, 2.0833e-4, max_relative = 1e-4);
        let v2 = alt_mean_general(&model, 2, 1.0, 3).unwrap();
        assert_relative_eq!(v2 / v, 16.0, max_relative = 1e-14);

        let id = CovarianceModel::identity(6).unwrap();
        assert_eq!(alt_mean_general(&id, 3, 0.8, 6).unwrap(), 0.0);
        assert_eq!(alt_mean_toeplitz(&id, 3, 0.8).unwrap(), 0.0);

        let t = CovarianceModel::toeplitz(&[1.0, 0.3, 0.0, 0.0]).unwrap();
        assert_relative_eq!(alt_mean_toeplitz(&t, 1, 1.0).unwrap(), 0.063640, max_relative = 1e-4);
        let t2 = CovarianceModel::toeplitz(&[1.0, 0.6, 0.0, 0.0]).unwrap();
        assert_relative_eq!(
            alt_mean_toeplitz(&t2, 1, 1.0).unwrap() / alt_mean_toeplitz(&t, 1, 1.0).unwrap(),
            4.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn alt_mean_toeplitz_rejects_general_matrix() {
        let m = array![[1.0, 0.1, 0.0], [0.1, 1.0, 0.2], [0.0, 0.2, 1.0]];
        let model = CovarianceModel::infer(m).unwrap();
        assert!(matches!(alt_mean_toeplitz(&model, 1, 1.0), Err(Error::NotToeplitz { .. })));
    }

    fn sample_strategy() -> impl Strategy<Value = (Array2<f64>, usize)> {
        (2usize..=6, 2usize..=8).prop_flat_map(|(n, p)| {
            (
                proptest::collection::vec(-3.0f64..3.0, n * p)
                    .prop_map(move |v| Array2::from_shape_vec((n, p), v).unwrap()),
                1usize..p,
            )
        })
    }

    proptest! {
        #[test]
        fn factorized_matches_bruteforce((y, m) in sample_strategy()) {
            let s = full(y);
            let g = stat_general(&s, m).unwrap().value;
            let gb = stat_general_bruteforce(&s, m).unwrap().value;
            prop_assert!(rel_close(g, gb, 1e-10) || (g - gb).abs() < 1e-13, "{} vs {}", g, gb);
            let t = stat_toeplitz(&s, m).unwrap().value;
            let tb = stat_toeplitz_bruteforce(&s, m).unwrap().value;
            prop_assert!(rel_close(t, tb, 1e-10) || (t - tb).abs() < 1e-13, "{} vs {}", t, tb);
        }

        #[test]
        fn row_permutation_invariance((y, m) in sample_strategy(), shift in 0usize..6) {
            let n = y.nrows();
            let perm: Vec<usize> = (0..n).map(|k| (k + shift) % n).rev().collect();
            let permuted = Array2::from_shape_fn(y.dim(), |(k, i)| y[[perm[k], i]]);
            let (a, b) = (full(y), full(permuted));
            let (g1, g2) = (stat_general(&a, m).unwrap().value, stat_general(&b, m).unwrap().value);
            prop_assert!(rel_close(g1, g2, 1e-12) || (g1 - g2).abs() < 1e-13);
            let (t1, t2) = (stat_toeplitz(&a, m).unwrap().value, stat_toeplitz(&b, m).unwrap().value);
            prop_assert!(rel_close(t1, t2, 1e-12) || (t1 - t2).abs() < 1e-13);
        }
    }
}
