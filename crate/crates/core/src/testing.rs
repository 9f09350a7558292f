//! Threshold tests built on the U-statistics: bandwidth choice, separation
//! rates, fixed-bandwidth tests and the adaptive test that aggregates dyadic
//! bandwidths `2^l` over `L_* <= l <= L^*`.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::covmodels::validate_a;
use crate::error::{Error, Result};
use crate::sampling::MaskedSample;
use crate::statistics::{null_moments, statistic, statistic_levels, StatKind, StatisticResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMode {
    /// `t = c a^4 phi^{2 + 1/(2 alpha)}`.
    Theory,
    /// `t = z_{1-level} sqrt(null variance)`.
    GaussianQuantile,
}

impl ThresholdMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ThresholdMode::Theory => "theory",
            ThresholdMode::GaussianQuantile => "quantile",
        }
    }
}

impl std::str::FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "theory" => Ok(ThresholdMode::Theory),
            "quantile" | "gaussian_quantile" | "gaussian" => Ok(ThresholdMode::GaussianQuantile),
            other => Err(Error::invalid("mode", format!("expected theory|quantile, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub mode: ThresholdMode,
    /// `c` (general) or `kappa` (Toeplitz) in Theory mode.
    pub c_const: f64,
    /// Target type I error in GaussianQuantile mode.
    pub level: f64,
    /// Lower constant in `D <= m^alpha phi`; must exceed 1.
    pub d_const: f64,
    pub k_const: f64,
}

impl Default for ThresholdSpec {
    fn default() -> Self {
        Self {
            mode: ThresholdMode::GaussianQuantile,
            c_const: 0.25,
            level: 0.05,
            d_const: 2.0,
            k_const: 1.0,
        }
    }
}

impl ThresholdSpec {
    pub fn quantile(level: f64) -> Self {
        Self {
            mode: ThresholdMode::GaussianQuantile,
            level,
            ..Self::default()
        }
    }

    pub fn theory(c_const: f64) -> Self {
        Self {
            mode: ThresholdMode::Theory,
            c_const,
            ..Self::default()
        }
    }

    /// `B = K (1 - D^{-2}) / sqrt 2`.
    pub fn b_bound(&self) -> f64 {
        self.k_const * (1.0 - self.d_const.powi(-2)) / std::f64::consts::SQRT_2
    }

    pub fn validate(&self, kind: StatKind) -> Result<()> {
        if !(self.d_const > 1.0) {
            return Err(Error::invalid("D", format!("must exceed 1, got {}", self.d_const)));
        }
        if !(self.k_const > 0.0) {
            return Err(Error::invalid("K", format!("must be positive, got {}", self.k_const)));
        }
        match self.mode {
            ThresholdMode::GaussianQuantile => {
                if !(self.level > 0.0 && self.level < 1.0) {
                    return Err(Error::invalid("level", format!("must lie in (0,1), got {}", self.level)));
                }
            }
            ThresholdMode::Theory => {
                let b = self.b_bound();
                let ok = match kind {
                    StatKind::General => self.c_const < b,
                    StatKind::Toeplitz => self.c_const <= b,
                };
                if !ok || !(self.c_const > 0.0) {
                    return Err(Error::ThresholdConstant {
                        constant: self.c_const,
                        bound: b,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Bandwidth picked by [`choose_m`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandwidthChoice {
    pub m: usize,
    /// Whether `m^alpha phi <= K^{-2 alpha}` also holds.
    pub upper_condition: bool,
}

/// Smallest `m >= 1` with `m^alpha phi >= D`, i.e. `ceil((D/phi)^{1/alpha})`.
pub fn choose_m(alpha: f64, phi: f64, d_const: f64, k_const: f64, p: usize) -> Result<BandwidthChoice> {
    if !(alpha > 0.0) {
        return Err(Error::invalid("alpha", format!("must be > 0, got {alpha}")));
    }
    if !(phi > 0.0 && phi < 1.0) {
        return Err(Error::invalid("phi", format!("must lie in (0,1), got {phi}")));
    }
    if !(d_const > 1.0) {
        return Err(Error::invalid("D", format!("must exceed 1, got {d_const}")));
    }
    let reaches = |m: f64| m.powf(alpha) * phi >= d_const * (1.0 - 1e-12);
    let raw = (d_const / phi).powf(1.0 / alpha).ceil();
    if !raw.is_finite() || raw > 1e15 {
        return Err(Error::BandwidthExceedsDimension { m: usize::MAX, p });
    }
    let mut m = (raw as usize).max(1);
    // (1.5 / 0.1) rounds up to 15.000000000000002
    while m > 1 && reaches((m - 1) as f64) {
        m -= 1;
    }
    while !reaches(m as f64) {
        m += 1;
    }
    if m >= p {
        return Err(Error::BandwidthExceedsDimension { m, p });
    }
    let upper_condition = (m as f64).powf(alpha) * phi <= k_const.powf(-2.0 * alpha);
    Ok(BandwidthChoice { m, upper_condition })
}

/// Effective sample size `a^2 n sqrt(p)` (general) or `a^2 n p` (Toeplitz).
pub fn effective_size(kind: StatKind, a: f64, n: usize, p: usize) -> f64 {
    match kind {
        StatKind::General => a * a * n as f64 * (p as f64).sqrt(),
        StatKind::Toeplitz => a * a * n as f64 * p as f64,
    }
}

fn rate_exponent(alpha: f64) -> f64 {
    2.0 * alpha / (4.0 * alpha + 1.0)
}

/// `(a^2 n sqrt p)^{-2 alpha / (4 alpha + 1)}`.
pub fn rate_general(alpha: f64, a: f64, n: usize, p: usize) -> f64 {
    effective_size(StatKind::General, a, n, p).powf(-rate_exponent(alpha))
}

/// `(a^2 n p)^{-2 alpha / (4 alpha + 1)}`.
pub fn rate_toeplitz(alpha: f64, a: f64, n: usize, p: usize) -> f64 {
    effective_size(StatKind::Toeplitz, a, n, p).powf(-rate_exponent(alpha))
}

pub fn rate(kind: StatKind, alpha: f64, a: f64, n: usize, p: usize) -> f64 {
    effective_size(kind, a, n, p).powf(-rate_exponent(alpha))
}

/// `(sqrt(ln ln x) / x)^{2 alpha / (4 alpha + 1)}` with `x` the effective size.
pub fn adaptive_rate(kind: StatKind, alpha: f64, a: f64, n: usize, p: usize) -> Result<f64> {
    let x = effective_size(kind, a, n, p);
    if !(x > std::f64::consts::E) {
        return Err(Error::invalid(
            "n",
            format!("effective size {x} must exceed e for ln ln to be positive"),
        ));
    }
    Ok((x.ln().ln().sqrt() / x).powf(rate_exponent(alpha)))
}

pub fn adaptive_rate_general(alpha: f64, a: f64, n: usize, p: usize) -> Result<f64> {
    adaptive_rate(StatKind::General, alpha, a, n, p)
}

pub fn adaptive_rate_toeplitz(alpha: f64, a: f64, n: usize, p: usize) -> Result<f64> {
    adaptive_rate(StatKind::Toeplitz, alpha, a, n, p)
}

fn standard_normal_quantile(q: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("unit normal").inverse_cdf(q)
}

/// Threshold of a fixed test at bandwidth `m`.
#[allow(clippy::too_many_arguments)]
pub fn fixed_threshold(
    spec: &ThresholdSpec,
    kind: StatKind,
    alpha: f64,
    phi: f64,
    a: f64,
    n: usize,
    p: usize,
    m: usize,
) -> Result<f64> {
    spec.validate(kind)?;
    Ok(match spec.mode {
        ThresholdMode::Theory => spec.c_const * a.powi(4) * phi.powf(2.0 + 1.0 / (2.0 * alpha)),
        ThresholdMode::GaussianQuantile => {
            standard_normal_quantile(1.0 - spec.level) * null_moments(kind, n, p, m, a).variance.sqrt()
        }
    })
}

/// One level of an adaptive test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelDecision {
    pub level: u32,
    pub m: usize,
    pub value: f64,
    pub threshold: f64,
    pub reject: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestOutcome {
    pub reject: bool,
    /// The tested statistic; for adaptive tests, the level with the largest
    /// ratio of statistic to threshold.
    pub statistic: StatisticResult,
    pub threshold: f64,
    pub per_level: Option<Vec<LevelDecision>>,
}

/// `1{statistic > threshold}` at a given bandwidth. Ties do not reject.
pub fn test_at_bandwidth(sample: &MaskedSample, kind: StatKind, m: usize, threshold: f64) -> Result<TestOutcome> {
    let stat = statistic(kind, sample, m)?;
    Ok(TestOutcome {
        reject: stat.value > threshold,
        statistic: stat,
        threshold,
        per_level: None,
    })
}

/// Fixed-`alpha` test: bandwidth from [`choose_m`], threshold from `spec`.
pub fn test_fixed(
    sample: &MaskedSample,
    alpha: f64,
    phi: f64,
    spec: &ThresholdSpec,
    kind: StatKind,
) -> Result<TestOutcome> {
    let (n, p, a) = (sample.n(), sample.p(), sample.a());
    let m = choose_m(alpha, phi, spec.d_const, spec.k_const, p)?.m;
    let t = fixed_threshold(spec, kind, alpha, phi, a, n, p, m)?;
    test_at_bandwidth(sample, kind, m, t)
}

/// Guaranteed mean of the statistic over the alternative,
/// `a^4 B phi^{2 + 1/(2 alpha)}` with `B = K (1 - D^{-2}) / sqrt 2`.
pub fn min_energy_lower_bound(alpha: f64, phi: f64, m: usize, a: f64, spec: &ThresholdSpec) -> Result<f64> {
    if (m as f64).powf(alpha) * phi < spec.d_const * (1.0 - 1e-12) {
        return Err(Error::invalid(
            "m",
            format!("m^alpha phi = {} is below D = {}", (m as f64).powf(alpha) * phi, spec.d_const),
        ));
    }
    Ok(a.powi(4) * spec.b_bound() * phi.powf(2.0 + 1.0 / (2.0 * alpha)))
}

/// Dyadic bandwidth grid and thresholds of the adaptive test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdaptiveGrid {
    pub kind: StatKind,
    pub alpha_star: f64,
    pub alpha_star_np: f64,
    pub c_star: f64,
    pub n: usize,
    pub p: usize,
    pub a: f64,
    /// `L_* ..= L^*`.
    pub levels: Vec<u32>,
    pub thresholds: Vec<f64>,
}

impl AdaptiveGrid {
    pub fn bandwidths(&self) -> Vec<usize> {
        self.levels.iter().map(|&l| 1usize << l).collect()
    }

    pub fn lower(&self) -> u32 {
        self.levels[0]
    }

    pub fn upper(&self) -> u32 {
        *self.levels.last().expect("nonempty grid")
    }
}

/// Default upper smoothness `ln x / ln ln x`, which is `o(ln x)`.
pub fn default_alpha_star_np(kind: StatKind, a: f64, n: usize, p: usize) -> f64 {
    let x = effective_size(kind, a, n, p);
    x.ln() / x.ln().ln()
}

/// Threshold of level `l`: `a^2 sqrt(C* ln l) / (n sqrt p)` (general) or
/// `a^2 sqrt(C* ln l) / (n (p - 2^l))` (Toeplitz).
pub fn level_threshold(kind: StatKind, c_star: f64, level: u32, a: f64, n: usize, p: usize) -> f64 {
    let num = a * a * (c_star * (level as f64).ln()).sqrt();
    match kind {
        StatKind::General => num / (n as f64 * (p as f64).sqrt()),
        StatKind::Toeplitz => num / (n as f64 * (p - (1usize << level)) as f64),
    }
}

pub fn build_grid(
    alpha_star: f64,
    alpha_star_np: Option<f64>,
    a: f64,
    n: usize,
    p: usize,
    c_star: f64,
    kind: StatKind,
) -> Result<AdaptiveGrid> {
    validate_a(a)?;
    let floor = match kind {
        StatKind::General => 0.5,
        StatKind::Toeplitz => 0.25,
    };
    if !(alpha_star > floor) {
        return Err(Error::invalid(
            "alpha_star",
            format!("must exceed {floor} for the {} test, got {alpha_star}", kind.as_str()),
        ));
    }
    if !(c_star > 4.0) {
        return Err(Error::invalid("c_star", format!("must exceed 4, got {c_star}")));
    }
    let x = effective_size(kind, a, n, p);
    if !(x > std::f64::consts::E) {
        return Err(Error::invalid("n", format!("effective size {x} must exceed e")));
    }
    let alpha_star_np = alpha_star_np.unwrap_or_else(|| default_alpha_star_np(kind, a, n, p));
    if !(alpha_star_np > alpha_star) {
        return Err(Error::invalid(
            "alpha_star_np",
            format!("must exceed alpha_star = {alpha_star}, got {alpha_star_np}"),
        ));
    }
    let scale = |alpha: f64| 2.0 * x.ln() / ((4.0 * alpha + 1.0) * std::f64::consts::LN_2);
    let lower = (scale(alpha_star_np).ceil().max(2.0)) as u32;
    let upper_raw = scale(alpha_star).floor();
    let upper = if upper_raw < 0.0 { 0 } else { upper_raw as u32 };
    if lower > upper {
        return Err(Error::EmptyGrid { lower, upper });
    }
    if upper >= usize::BITS - 1 || (1usize << upper) >= p {
        return Err(Error::GridExceedsDimension { level: upper, p });
    }
    let levels: Vec<u32> = (lower..=upper).collect();
    let thresholds = levels
        .iter()
        .map(|&l| level_threshold(kind, c_star, l, a, n, p))
        .collect();
    Ok(AdaptiveGrid {
        kind,
        alpha_star,
        alpha_star_np,
        c_star,
        n,
        p,
        a,
        levels,
        thresholds,
    })
}

/// Rejects when the statistic at some `m = 2^l` exceeds its `t_l`.
pub fn test_adaptive(sample: &MaskedSample, grid: &AdaptiveGrid) -> Result<TestOutcome> {
    if sample.p() != grid.p {
        return Err(Error::DimensionMismatch {
            what: "sample p vs grid p",
            expected: grid.p,
            got: sample.p(),
        });
    }
    if sample.n() != grid.n {
        return Err(Error::DimensionMismatch {
            what: "sample n vs grid n",
            expected: grid.n,
            got: sample.n(),
        });
    }
    let stats = statistic_levels(grid.kind, sample, &grid.bandwidths())?;
    let per_level: Vec<LevelDecision> = grid
        .levels
        .iter()
        .zip(&grid.thresholds)
        .zip(&stats)
        .map(|((&level, &threshold), s)| LevelDecision {
            level,
            m: s.m,
            value: s.value,
            threshold,
            reject: s.value > threshold,
        })
        .collect();
    let (best, _) = per_level
        .iter()
        .enumerate()
        .map(|(i, d)| (i, d.value / d.threshold))
        .fold((0, f64::NEG_INFINITY), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
    Ok(TestOutcome {
        reject: per_level.iter().any(|d| d.reject),
        statistic: stats[best],
        threshold: per_level[best].threshold,
        per_level: Some(per_level),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::Array2;

    #[test]
    fn choose_m_examples() {
        assert_eq!(choose_m(1.0, 0.1, 1.5, 1.0, 100).unwrap().m, 15);
        assert_eq!(choose_m(2.0, 0.25, 1.5, 1.0, 100).unwrap().m, 3);
        assert_eq!(choose_m(1.0, 0.9, 1.5, 1.0, 100).unwrap().m, 2);
        let c = choose_m(3.0, 0.5, 1.1, 1.0, 100).unwrap();
        assert!((c.m as f64).powi(3) * 0.5 >= 1.1);
        assert!(((c.m - 1) as f64).powi(3) * 0.5 < 1.1);
    }

    #[test]
    fn choose_m_bandwidth_error() {
        assert!(matches!(
            choose_m(1.0, 0.01, 2.0, 1.0, 100),
            Err(Error::BandwidthExceedsDimension { m: 200, p: 100 })
        ));
        assert!(choose_m(1.0, 0.1, 1.0, 1.0, 100).is_err());
        assert!(choose_m(1.0, 1.2, 2.0, 1.0, 100).is_err());
    }

    #[test]
    fn choose_m_reports_upper_condition() {
        // K = 1 makes D <= m^alpha phi <= 1 impossible
        assert!(!choose_m(1.0, 0.1, 2.0, 1.0, 100).unwrap().upper_condition);
        assert!(choose_m(1.0, 0.1, 2.0, 0.5, 100).unwrap().upper_condition);
    }

    #[test]
    fn rate_examples() {
        assert_relative_eq!(rate_general(1.0, 0.5, 1000, 100), 2500f64.powf(-0.4), max_relative = 1e-14);
        assert_relative_eq!(rate_general(1.0, 0.5, 1000, 100), 0.04373, max_relative = 1e-3);
        assert_relative_eq!(
            rate_general(1.3, 1.0, 500, 64),
            (500.0 * 8.0f64).powf(-2.6 / 6.2),
            max_relative = 1e-14
        );
        for &(n, p) in &[(10, 10), (1000, 100), (50, 4000)] {
            assert!(rate_toeplitz(1.0, 0.7, n, p) <= rate_general(1.0, 0.7, n, p));
        }
    }

    #[test]
    fn adaptive_rate_examples() {
        // a^2 n sqrt p = 2500
        let r = adaptive_rate_general(1.0, 0.5, 1000, 100).unwrap();
        assert_relative_eq!(r, (2500f64.ln().ln().sqrt() / 2500.0).powf(0.4), max_relative = 1e-14);
        assert_relative_eq!(r, 0.05054, max_relative = 1e-3);
        let loss = r / rate_general(1.0, 0.5, 1000, 100);
        assert_relative_eq!(loss, 2500f64.ln().ln().powf(0.2), max_relative = 1e-12);
        // a^2 n sqrt p = 2
        assert!(adaptive_rate_general(1.0, 1.0, 1, 4).is_err());
        assert!(adaptive_rate_toeplitz(1.0, 1.0, 1, 2).is_err());
    }

    #[test]
    fn theory_threshold_arithmetic() {
        let spec = ThresholdSpec::theory(0.1);
        let t = fixed_threshold(&spec, StatKind::General, 1.0, 0.1, 1.0, 10, 50, 20).unwrap();
        assert_relative_eq!(t, 3.1623e-4, max_relative = 1e-4);
        // scaling a by kappa scales the threshold by kappa^4 exactly
        let t2 = fixed_threshold(&spec, StatKind::General, 1.0, 0.1, 0.5, 10, 50, 20).unwrap();
        assert_eq!(t2, 0.1 * 0.5f64.powi(4) * 0.1f64.powf(2.5));
    }

    #[test]
    fn theory_constant_bound() {
        let b = ThresholdSpec::default().b_bound();
        assert_relative_eq!(b, 0.75 / std::f64::consts::SQRT_2, max_relative = 1e-15);
        let at_bound = ThresholdSpec::theory(b);
        assert!(matches!(
            at_bound.validate(StatKind::General),
            Err(Error::ThresholdConstant { .. })
        ));
        assert!(at_bound.validate(StatKind::Toeplitz).is_ok());
        assert!(ThresholdSpec::theory(0.6).validate(StatKind::Toeplitz).is_err());
    }

    #[test]
    fn quantile_threshold() {
        let spec = ThresholdSpec::quantile(0.05);
        let t = fixed_threshold(&spec, StatKind::General, 1.0, 0.1, 0.8, 100, 200, 8).unwrap();
        let sd = 0.64 / (100.0 * 99.0 * 200.0f64).sqrt();
        assert_relative_eq!(t / sd, 1.6448536269514722, max_relative = 1e-9);
    }

    #[test]
    fn zero_sample_never_rejects() {
        let s = MaskedSample::fully_observed(Array2::zeros((10, 40)));
        let o = test_fixed(&s, 1.0, 0.2, &ThresholdSpec::quantile(0.05), StatKind::General).unwrap();
        assert!(!o.reject);
        let grid = build_grid(0.75, None, 1.0, 10, 40, 4.5, StatKind::General).unwrap();
        let o = test_adaptive(&s, &grid).unwrap();
        assert!(!o.reject);
        assert!(o.per_level.unwrap().iter().all(|d| !d.reject));
    }

    #[test]
    fn grid_example() {
        let g = build_grid(0.75, Some(5.0), 1.0, 10_000, 10_000, 4.5, StatKind::General).unwrap();
        assert_eq!(g.lower(), 2);
        assert_eq!(g.upper(), 9);
        assert_relative_eq!(g.thresholds[0], 1.7662e-6, max_relative = 1e-4);
        for (&l, &t) in g.levels.iter().zip(&g.thresholds) {
            assert!(t > 0.0 && t.is_finite());
            assert!((1usize << l) < 10_000);
            assert_eq!(t, level_threshold(StatKind::General, 4.5, l, 1.0, 10_000, 10_000));
        }
    }

    #[test]
    fn toeplitz_grid_uses_p_minus_bandwidth() {
        let g = build_grid(0.75, None, 1.0, 200, 256, 4.5, StatKind::Toeplitz).unwrap();
        for (&l, &t) in g.levels.iter().zip(&g.thresholds) {
            let want = (4.5 * (l as f64).ln()).sqrt() / (200.0 * (256 - (1 << l)) as f64);
            assert_relative_eq!(t, want, max_relative = 1e-15);
        }
    }

    #[test]
    fn grid_errors() {
        assert!(matches!(
            build_grid(0.75, None, 1.0, 100_000, 64, 4.5, StatKind::General),
            Err(Error::GridExceedsDimension { .. })
        ));
        assert!(build_grid(0.5, None, 1.0, 1000, 1000, 4.5, StatKind::General).is_err());
        // alpha_star = 0.3 is admissible for Toeplitz, but the grid then outgrows p
        assert!(matches!(
            build_grid(0.3, None, 1.0, 1000, 1000, 4.5, StatKind::Toeplitz),
            Err(Error::GridExceedsDimension { .. })
        ));
        assert!(build_grid(0.75, None, 1.0, 1000, 1000, 4.0, StatKind::General).is_err());
        assert!(matches!(
            build_grid(3.0, Some(3.5), 1.0, 100, 100, 4.5, StatKind::General),
            Err(Error::EmptyGrid { .. })
        ));
    }

    #[test]
    fn min_energy_example() {
        let spec = ThresholdSpec::default();
        let v = min_energy_lower_bound(1.0, 0.1, 20, 1.0, &spec).unwrap();
        assert_relative_eq!(v, 1.6771e-3, max_relative = 1e-4);
        assert!(min_energy_lower_bound(1.0, 0.1, 10, 1.0, &spec).is_err());
        let bigger_d = ThresholdSpec {
            d_const: 4.0,
            ..spec
        };
        assert!(min_energy_lower_bound(1.0, 0.1, 40, 1.0, &bigger_d).unwrap() > v);
    }
}
