//! Monte Carlo estimates of error probabilities, rate sweeps and the
//! lower-bound power probe.
//!
//! Replication `r` of plan entry `e` draws all of its samples from
//! `derive_seed(master_seed, [e, r])`. The null sample and every alternative
//! sample of that replication share the seed, hence the same mask and the
//! same underlying standard normals. Replications run on a rayon pool, are
//! collected in replication order and reduced sequentially, so results do not
//! depend on the number of threads.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::covmodels::{construct_extremal_general, construct_extremal_toeplitz, ClassParams, CovarianceModel, ExtremalSpec};
use crate::error::{Error, Result};
use crate::sampling::{derive_seed, sample, MaskedSample};
use crate::statistics::{statistic, StatKind};
use crate::testing::{
    adaptive_rate, build_grid, choose_m, fixed_threshold, rate, test_adaptive, AdaptiveGrid, ThresholdSpec,
};

/// Column names of every CSV table written by this module.
pub const CSV_HEADER: &str =
    "scenario_id,kind,n,p,a,alpha,phi,C,R,eta_hat,beta_hat,gamma_hat,se_eta,se_beta,wall_ms";

/// Thread pool used for replications. `None` threads means rayon's global pool.
pub struct Runner {
    pool: Option<rayon::ThreadPool>,
}

impl Runner {
    pub fn new(threads: Option<usize>) -> Result<Self> {
        let pool = match threads {
            None => None,
            Some(0) => return Err(Error::invalid("threads", "must be at least 1")),
            Some(t) => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Error::invalid("threads", e.to_string()))?,
            ),
        };
        Ok(Self { pool })
    }

    pub fn sequential() -> Self {
        Self::new(Some(1)).expect("single thread pool")
    }

    /// `(0..count).map(f)` in parallel; the output keeps index order and the
    /// first error in index order wins.
    fn map<T, F>(&self, count: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync + Send,
    {
        let run = || (0..count).into_par_iter().map(&f).collect::<Vec<Result<T>>>();
        let out = match &self.pool {
            Some(pool) => pool.install(run),
            None => run(),
        };
        out.into_iter().collect()
    }
}

impl Default for Runner {
    fn default() -> Self {
        Self { pool: None }
    }
}

/// One `(n, p, a, alpha, C)` point of a plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    pub n: usize,
    pub p: usize,
    pub a: f64,
    pub alpha: f64,
    /// Multiplier `C` in `phi = C * rate`.
    pub multiplier: f64,
}

impl Scenario {
    pub fn class_params(&self, phi: f64) -> ClassParams {
        ClassParams {
            alpha: self.alpha,
            phi,
            a: self.a,
            n: self.n,
            p: self.p,
        }
    }
}

/// The rate that `phi = C * rate` is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RateBase {
    Minimax(StatKind),
    Adaptive(StatKind),
}

impl RateBase {
    pub fn value(self, alpha: f64, a: f64, n: usize, p: usize) -> Result<f64> {
        match self {
            RateBase::Minimax(kind) => Ok(rate(kind, alpha, a, n, p)),
            RateBase::Adaptive(kind) => adaptive_rate(kind, alpha, a, n, p),
        }
    }
}

/// Alternatives against which the type II error is estimated.
#[derive(Debug, Clone, PartialEq)]
pub enum Alternative {
    /// Banded matrix with independent signs per entry, redrawn every replication.
    ExtremalGeneral,
    /// Banded Toeplitz matrix with one sign per diagonal, redrawn every replication.
    ExtremalToeplitz,
    /// A fixed matrix; `phi` is ignored.
    User(CovarianceModel),
}

impl Alternative {
    pub fn draw(&self, params: &ClassParams, seed: u64) -> Result<CovarianceModel> {
        match self {
            Alternative::ExtremalGeneral => construct_extremal_general(params, seed),
            Alternative::ExtremalToeplitz => construct_extremal_toeplitz(params, seed),
            Alternative::User(model) => {
                if model.dim() != params.p {
                    return Err(Error::DimensionMismatch {
                        what: "alternative dimension vs p",
                        expected: params.p,
                        got: model.dim(),
                    });
                }
                Ok(model.clone())
            }
        }
    }

    /// Checks that `phi` admits the construction.
    pub fn check(&self, params: &ClassParams) -> Result<()> {
        params.validate()?;
        match self {
            Alternative::User(model) if model.dim() != params.p => Err(Error::DimensionMismatch {
                what: "alternative dimension vs p",
                expected: params.p,
                got: model.dim(),
            }),
            Alternative::User(_) => Ok(()),
            _ => ExtremalSpec::new(params.alpha, params.phi, 0).map(|_| ()),
        }
    }
}

/// A test family, to be instantiated at given `(n, p, a, alpha, phi)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Procedure {
    Fixed {
        kind: StatKind,
        spec: ThresholdSpec,
        /// Use `m = p - 1` when the chosen bandwidth would not fit.
        cap_m: bool,
    },
    Adaptive {
        kind: StatKind,
        c_star: f64,
        alpha_star: f64,
        alpha_star_np: Option<f64>,
    },
    AlwaysReject,
    NeverReject,
}

impl Procedure {
    pub fn label(&self) -> &'static str {
        match self {
            Procedure::Fixed {
                kind: StatKind::General,
                ..
            } => "general",
            Procedure::Fixed {
                kind: StatKind::Toeplitz,
                ..
            } => "toeplitz",
            Procedure::Adaptive {
                kind: StatKind::General,
                ..
            } => "adaptive_general",
            Procedure::Adaptive {
                kind: StatKind::Toeplitz,
                ..
            } => "adaptive_toeplitz",
            Procedure::AlwaysReject => "always",
            Procedure::NeverReject => "never",
        }
    }

    pub fn prepare(&self, params: &ClassParams) -> Result<PreparedTest> {
        params.validate()?;
        let ClassParams { alpha, phi, a, n, p } = *params;
        match self {
            Procedure::Fixed { kind, spec, cap_m } => {
                spec.validate(*kind)?;
                let m = match choose_m(alpha, phi, spec.d_const, spec.k_const, p) {
                    Ok(choice) => choice.m,
                    Err(Error::BandwidthExceedsDimension { .. }) if *cap_m && p > 1 => p - 1,
                    Err(e) => return Err(e),
                };
                let threshold = fixed_threshold(spec, *kind, alpha, phi, a, n, p, m)?;
                Ok(PreparedTest::Fixed {
                    kind: *kind,
                    m,
                    threshold,
                })
            }
            Procedure::Adaptive {
                kind,
                c_star,
                alpha_star,
                alpha_star_np,
            } => Ok(PreparedTest::Adaptive(build_grid(
                *alpha_star,
                *alpha_star_np,
                a,
                n,
                p,
                *c_star,
                *kind,
            )?)),
            Procedure::AlwaysReject => Ok(PreparedTest::Always),
            Procedure::NeverReject => Ok(PreparedTest::Never),
        }
    }
}

/// A test with all constants resolved.
#[derive(Debug, Clone, PartialEq)]
pub enum PreparedTest {
    Fixed { kind: StatKind, m: usize, threshold: f64 },
    Adaptive(AdaptiveGrid),
    Always,
    Never,
}

impl PreparedTest {
    pub fn rejects(&self, sample: &MaskedSample) -> Result<bool> {
        match self {
            PreparedTest::Fixed { kind, m, threshold } => Ok(statistic(*kind, sample, *m)?.value > *threshold),
            PreparedTest::Adaptive(grid) => Ok(test_adaptive(sample, grid)?.reject),
            PreparedTest::Always => Ok(true),
            PreparedTest::Never => Ok(false),
        }
    }
}

/// Monte Carlo error estimates with binomial standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorEstimates {
    pub eta_hat: f64,
    /// Largest non-rejection frequency over the alternatives.
    pub beta_hat: f64,
    pub gamma_hat: f64,
    pub replications: usize,
    pub se_eta: f64,
    pub se_beta: f64,
}

impl ErrorEstimates {
    fn from_counts(null_rejections: usize, alt_misses: &[usize], replications: usize) -> Self {
        let r = replications as f64;
        let eta_hat = null_rejections as f64 / r;
        let beta_hat = alt_misses.iter().copied().max().map_or(0.0, |c| c as f64 / r);
        Self {
            eta_hat,
            beta_hat,
            gamma_hat: eta_hat + beta_hat,
            replications,
            se_eta: binomial_se(eta_hat, replications),
            se_beta: binomial_se(beta_hat, replications),
        }
    }

    /// Standard error of `gamma_hat`, treating the two parts as independent.
    pub fn se_gamma(&self) -> f64 {
        self.se_eta.hypot(self.se_beta)
    }
}

pub fn binomial_se(freq: f64, replications: usize) -> f64 {
    (freq * (1.0 - freq) / replications as f64).sqrt()
}

/// Per-replication rejection indicators of `test`, under the null when
/// `alternative` is `None`, else under alternative number `index` of a plan.
#[allow(clippy::too_many_arguments)]
pub fn rejection_indicators(
    runner: &Runner,
    test: &PreparedTest,
    alternative: Option<(&Alternative, usize)>,
    params: &ClassParams,
    entry: usize,
    replications: usize,
    master_seed: u64,
) -> Result<Vec<bool>> {
    params.validate()?;
    let identity = CovarianceModel::identity(params.p)?;
    runner.map(replications, |r| {
        let seed = derive_seed(master_seed, &[entry as u64, r as u64]);
        let sample = match alternative {
            None => sample(&identity, params.n, params.a, seed)?,
            Some((alt, j)) => {
                let model = alt.draw(params, derive_seed(seed, &[j as u64]))?;
                sample(&model, params.n, params.a, seed)?
            }
        };
        test.rejects(&sample)
    })
}

fn count(flags: &[bool]) -> usize {
    flags.iter().filter(|&&f| f).count()
}

/// Estimates `eta`, `beta` and `gamma` of `test` at `params` over the given
/// alternatives.
pub fn estimate_errors(
    runner: &Runner,
    test: &PreparedTest,
    alternatives: &[Alternative],
    params: &ClassParams,
    entry: usize,
    replications: usize,
    master_seed: u64,
) -> Result<ErrorEstimates> {
    check_replications(replications)?;
    let null = count(&rejection_indicators(runner, test, None, params, entry, replications, master_seed)?);
    let misses = alternative_misses(runner, test, alternatives, params, entry, replications, master_seed)?;
    Ok(ErrorEstimates::from_counts(null, &misses, replications))
}

fn alternative_misses(
    runner: &Runner,
    test: &PreparedTest,
    alternatives: &[Alternative],
    params: &ClassParams,
    entry: usize,
    replications: usize,
    master_seed: u64,
) -> Result<Vec<usize>> {
    alternatives
        .iter()
        .enumerate()
        .map(|(j, alt)| {
            let flags = rejection_indicators(runner, test, Some((alt, j)), params, entry, replications, master_seed)?;
            Ok(replications - count(&flags))
        })
        .collect()
}

fn check_replications(replications: usize) -> Result<()> {
    if replications == 0 {
        Err(Error::invalid("R", "must be at least 1"))
    } else {
        Ok(())
    }
}

/// Why a sweep row carries no threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// `gamma_hat > target` even at the largest multiplier.
    NotBracketed,
    /// `gamma_hat <= target` already at the smallest multiplier.
    BelowRange,
    /// Some larger multiplier had a clearly larger `gamma_hat`.
    NonMonotone,
}

/// One output line. Flagged rows have `phi` and `C` set to NaN.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub scenario_id: usize,
    pub kind: String,
    pub n: usize,
    pub p: usize,
    pub a: f64,
    pub alpha: f64,
    pub phi: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "R")]
    pub replications: usize,
    pub eta_hat: f64,
    pub beta_hat: f64,
    pub gamma_hat: f64,
    pub se_eta: f64,
    pub se_beta: f64,
    /// Zero unless timing was requested, so repeated runs stay byte-identical.
    pub wall_ms: u64,
    pub status: RowStatus,
}

impl SweepRow {
    fn new(id: usize, kind: &str, s: &Scenario, phi: f64, c: f64, est: &ErrorEstimates, wall_ms: u64, status: RowStatus) -> Self {
        Self {
            scenario_id: id,
            kind: kind.to_string(),
            n: s.n,
            p: s.p,
            a: s.a,
            alpha: s.alpha,
            phi,
            c,
            replications: est.replications,
            eta_hat: est.eta_hat,
            beta_hat: est.beta_hat,
            gamma_hat: est.gamma_hat,
            se_eta: est.se_eta,
            se_beta: est.se_beta,
            wall_ms,
            status,
        }
    }
}

/// Renders rows under [`CSV_HEADER`].
pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.scenario_id,
            r.kind,
            r.n,
            r.p,
            r.a,
            r.alpha,
            r.phi,
            r.c,
            r.replications,
            r.eta_hat,
            r.beta_hat,
            r.gamma_hat,
            r.se_eta,
            r.se_beta,
            r.wall_ms
        );
    }
    out
}

/// Scenarios, test family, alternatives and Monte Carlo settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub scenarios: Vec<Scenario>,
    pub procedure: Procedure,
    pub rate_base: RateBase,
    pub alternatives: Vec<Alternative>,
    pub replications: usize,
    pub master_seed: u64,
    /// Bisection bracket on the multiplier `C`.
    pub c_lo: f64,
    pub c_hi: f64,
    pub bisection_steps: usize,
    pub gamma_target: f64,
    pub record_timing: bool,
}

impl SweepPlan {
    /// Plan with the default bisection settings: bracket `[0.25, 4]`, 8 steps,
    /// target 0.25.
    pub fn new(
        scenarios: Vec<Scenario>,
        procedure: Procedure,
        rate_base: RateBase,
        alternatives: Vec<Alternative>,
        replications: usize,
        master_seed: u64,
    ) -> Self {
        Self {
            scenarios,
            procedure,
            rate_base,
            alternatives,
            replications,
            master_seed,
            c_lo: 0.25,
            c_hi: 4.0,
            bisection_steps: 8,
            gamma_target: 0.25,
            record_timing: false,
        }
    }

    fn phi(&self, s: &Scenario, c: f64) -> Result<f64> {
        Ok(c * self.rate_base.value(s.alpha, s.a, s.n, s.p)?)
    }

    fn check_point(&self, s: &Scenario, c: f64) -> Result<()> {
        let params = s.class_params(self.phi(s, c)?);
        self.procedure.prepare(&params)?;
        self.alternatives.iter().try_for_each(|alt| alt.check(&params))
    }

    /// Fails fast on the first scenario whose multiplier (or bisection
    /// bracket, when `bisect` is set) violates a precondition.
    pub fn validate(&self, bisect: bool) -> Result<()> {
        check_replications(self.replications)?;
        if self.scenarios.is_empty() {
            return Err(Error::invalid("scenarios", "plan has no scenarios"));
        }
        if bisect {
            if !(self.c_lo > 0.0 && self.c_hi > self.c_lo) {
                return Err(Error::invalid(
                    "c_lo",
                    format!("need 0 < c_lo < c_hi, got [{}, {}]", self.c_lo, self.c_hi),
                ));
            }
            if !(self.gamma_target > 0.0 && self.gamma_target < 2.0) {
                return Err(Error::invalid("gamma_target", format!("must lie in (0,2), got {}", self.gamma_target)));
            }
        }
        for s in &self.scenarios {
            if bisect {
                self.check_point(s, self.c_lo)?;
                self.check_point(s, self.c_hi)?;
            } else {
                self.check_point(s, s.multiplier)?;
            }
        }
        Ok(())
    }
}

fn elapsed_ms(start: Instant, record: bool) -> u64 {
    if record {
        start.elapsed().as_millis() as u64
    } else {
        0
    }
}

/// Error estimates at each scenario's own multiplier.
pub fn error_table(plan: &SweepPlan, runner: &Runner) -> Result<Vec<SweepRow>> {
    plan.validate(false)?;
    let label = plan.procedure.label();
    plan.scenarios
        .iter()
        .enumerate()
        .map(|(id, s)| {
            let start = Instant::now();
            let phi = plan.phi(s, s.multiplier)?;
            let params = s.class_params(phi);
            let test = plan.procedure.prepare(&params)?;
            let est = estimate_errors(
                runner,
                &test,
                &plan.alternatives,
                &params,
                id,
                plan.replications,
                plan.master_seed,
            )?;
            let wall = elapsed_ms(start, plan.record_timing);
            Ok(SweepRow::new(id, label, s, phi, s.multiplier, &est, wall, RowStatus::Ok))
        })
        .collect()
}

/// Evaluates `gamma_hat(C)` with common random numbers across `C` and reuses
/// null counts for tests that coincide.
struct Evaluator<'a> {
    plan: &'a SweepPlan,
    runner: &'a Runner,
    scenario: &'a Scenario,
    entry: usize,
    null_cache: Vec<(PreparedTest, usize)>,
    history: Vec<(f64, ErrorEstimates)>,
}

impl Evaluator<'_> {
    fn eval(&mut self, c: f64) -> Result<ErrorEstimates> {
        let plan = self.plan;
        let params = self.scenario.class_params(plan.phi(self.scenario, c)?);
        let test = plan.procedure.prepare(&params)?;
        let null = match self.null_cache.iter().find(|(t, _)| *t == test) {
            Some(&(_, k)) => k,
            None => {
                let flags = rejection_indicators(
                    self.runner,
                    &test,
                    None,
                    &params,
                    self.entry,
                    plan.replications,
                    plan.master_seed,
                )?;
                let k = count(&flags);
                self.null_cache.push((test.clone(), k));
                k
            }
        };
        let misses = alternative_misses(
            self.runner,
            &test,
            &plan.alternatives,
            &params,
            self.entry,
            plan.replications,
            plan.master_seed,
        )?;
        let est = ErrorEstimates::from_counts(null, &misses, plan.replications);
        self.history.push((c, est));
        Ok(est)
    }

    fn non_monotone(&self) -> bool {
        let mut h = self.history.clone();
        h.sort_by(|x, y| x.0.total_cmp(&y.0));
        h.iter().enumerate().any(|(i, (_, lo))| {
            h[i + 1..]
                .iter()
                .any(|(_, hi)| hi.gamma_hat - lo.gamma_hat > 3.0 * lo.se_gamma().hypot(hi.se_gamma()))
        })
    }
}

/// For each scenario, bisects (in `log C`) for the smallest multiplier with
/// `gamma_hat(C * rate) <= gamma_target`. Unresolvable scenarios yield
/// flagged rows instead of errors.
pub fn rate_sweep(plan: &SweepPlan, runner: &Runner) -> Result<Vec<SweepRow>> {
    plan.validate(true)?;
    let label = plan.procedure.label();
    let mut rows = Vec::with_capacity(plan.scenarios.len());
    for (id, s) in plan.scenarios.iter().enumerate() {
        let start = Instant::now();
        let mut ev = Evaluator {
            plan,
            runner,
            scenario: s,
            entry: id,
            null_cache: Vec::new(),
            history: Vec::new(),
        };
        let target = plan.gamma_target;
        let (mut lo, mut hi) = (plan.c_lo, plan.c_hi);
        let at_hi = ev.eval(hi)?;
        let flagged = |est: &ErrorEstimates, status, wall| SweepRow::new(id, label, s, f64::NAN, f64::NAN, est, wall, status);
        if at_hi.gamma_hat > target {
            rows.push(flagged(&at_hi, RowStatus::NotBracketed, elapsed_ms(start, plan.record_timing)));
            continue;
        }
        let at_lo = ev.eval(lo)?;
        if at_lo.gamma_hat <= target {
            rows.push(flagged(&at_lo, RowStatus::BelowRange, elapsed_ms(start, plan.record_timing)));
            continue;
        }
        let mut best = at_hi;
        for _ in 0..plan.bisection_steps {
            let mid = (lo * hi).sqrt();
            let est = ev.eval(mid)?;
            if est.gamma_hat <= target {
                hi = mid;
                best = est;
            } else {
                lo = mid;
            }
        }
        let wall = elapsed_ms(start, plan.record_timing);
        if ev.non_monotone() {
            rows.push(flagged(&best, RowStatus::NonMonotone, wall));
        } else {
            rows.push(SweepRow::new(id, label, s, plan.phi(s, hi)?, hi, &best, wall, RowStatus::Ok));
        }
    }
    Ok(rows)
}

/// Output of [`power_collapse_probe`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResult {
    /// One row per shrink factor; `C` holds the factor `s`.
    pub rows: Vec<SweepRow>,
    /// `p / (a^2 n)^{4 alpha - 1}`; the lower bound is proved when this
    /// tends to zero. Recorded, not enforced.
    pub regime_ratio: f64,
}

/// Probe settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub kind: StatKind,
    pub alpha: f64,
    pub a: f64,
    pub n: usize,
    pub p: usize,
    pub shrink: Vec<f64>,
    pub spec: ThresholdSpec,
    pub replications: usize,
    pub master_seed: u64,
}

/// `gamma_hat` of the fixed test against extremal alternatives at
/// `phi = s * rate` for each shrink factor `s`. All factors reuse the same
/// replication seeds. Bandwidths that do not fit are capped at `p - 1`.
pub fn power_collapse_probe(cfg: &ProbeConfig, runner: &Runner) -> Result<ProbeResult> {
    check_replications(cfg.replications)?;
    if cfg.shrink.is_empty() || cfg.shrink.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return Err(Error::invalid("shrink", "need one or more positive factors"));
    }
    let base = rate(cfg.kind, cfg.alpha, cfg.a, cfg.n, cfg.p);
    let procedure = Procedure::Fixed {
        kind: cfg.kind,
        spec: cfg.spec,
        cap_m: true,
    };
    let alternative = match cfg.kind {
        StatKind::General => Alternative::ExtremalGeneral,
        StatKind::Toeplitz => Alternative::ExtremalToeplitz,
    };
    let scenario = |s: f64| Scenario {
        n: cfg.n,
        p: cfg.p,
        a: cfg.a,
        alpha: cfg.alpha,
        multiplier: s,
    };
    let mut tests = Vec::with_capacity(cfg.shrink.len());
    for &s in &cfg.shrink {
        let params = scenario(s).class_params(s * base);
        alternative.check(&params)?;
        tests.push((params, procedure.prepare(&params)?));
    }
    let mut null_cache: Vec<(PreparedTest, usize)> = Vec::new();
    let mut rows = Vec::with_capacity(cfg.shrink.len());
    for (id, (&s, (params, test))) in cfg.shrink.iter().zip(&tests).enumerate() {
        let null = match null_cache.iter().find(|(t, _)| t == test) {
            Some(&(_, k)) => k,
            None => {
                let k = count(&rejection_indicators(runner, test, None, params, 0, cfg.replications, cfg.master_seed)?);
                null_cache.push((test.clone(), k));
                k
            }
        };
        let misses = alternative_misses(
            runner,
            test,
            std::slice::from_ref(&alternative),
            params,
            0,
            cfg.replications,
            cfg.master_seed,
        )?;
        let est = ErrorEstimates::from_counts(null, &misses, cfg.replications);
        rows.push(SweepRow::new(id, procedure.label(), &scenario(s), params.phi, s, &est, 0, RowStatus::Ok));
    }
    let regime_ratio = cfg.p as f64 / (cfg.a * cfg.a * cfg.n as f64).powf(4.0 * cfg.alpha - 1.0);
    Ok(ProbeResult { rows, regime_ratio })
}

/// Kolmogorov-Smirnov distance between the empirical law of `values` and
/// the standard normal.
pub fn ks_distance_normal(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let n = v.len() as f64;
    v.iter().enumerate().fold(0.0, |d: f64, (i, &x)| {
        let f = normal.cdf(x);
        d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs())
    })
}
