//! One function per subcommand. Each reads and validates all of its keys
//! before doing any work, then returns the rendered output.

use std::fmt::Write as _;

use covtest_core::covmodels::{construct_extremal_general, construct_extremal_toeplitz, ClassParams, CovarianceModel};
use covtest_core::experiments::{
    error_table, power_collapse_probe, rate_sweep, to_csv, Alternative, ProbeConfig, Procedure, RateBase, Runner, Scenario,
    SweepPlan, SweepRow,
};
use covtest_core::sampling::{derive_seed, sample, MaskedSample};
use covtest_core::selftest::run_selftest;
use covtest_core::statistics::{statistic_levels, StatKind};
use covtest_core::testing::{build_grid, choose_m, fixed_threshold, test_adaptive, test_at_bandwidth, ThresholdSpec};
use serde::Serialize;

use crate::config::Params;
use crate::{CliError, Format, Options};

pub struct Output {
    pub text: String,
    /// Set when the command ran but reported failed checks.
    pub failed: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, failed: false }
    }
}

fn seed(params: &Params, opts: &Options) -> Result<u64, CliError> {
    let from_config = params.get("seed", 0u64)?;
    Ok(opts.seed.unwrap_or(from_config))
}

fn read_file(key: &str, path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(key, format!("{path}: {e}")))
}

fn check_a(a: f64) -> Result<(), CliError> {
    if a > 0.0 && a <= 1.0 {
        Ok(())
    } else {
        Err(CliError::config("a", format!("must lie in (0,1], got {a}")))
    }
}

fn threshold_spec(params: &Params) -> Result<ThresholdSpec, CliError> {
    let d = ThresholdSpec::default();
    Ok(ThresholdSpec {
        mode: params.get("mode", d.mode)?,
        c_const: params.get("c", d.c_const)?,
        level: params.get("level", d.level)?,
        d_const: params.get("D", d.d_const)?,
        k_const: params.get("K", d.k_const)?,
    })
}

/// Where a model comes from: `model_file` (dense CSV) or `toeplitz_file`
/// (first row). Paths are read up front; files are opened by `load`.
enum ModelSource {
    Dense(String),
    Toeplitz(String),
    None,
}

impl ModelSource {
    fn read(params: &Params) -> Result<Self, CliError> {
        let dense: Option<String> = params.opt("model_file")?;
        let toeplitz: Option<String> = params.opt("toeplitz_file")?;
        match (dense, toeplitz) {
            (Some(_), Some(_)) => Err(CliError::config("model_file", "give either model_file or toeplitz_file, not both")),
            (Some(path), None) => Ok(ModelSource::Dense(path)),
            (None, Some(path)) => Ok(ModelSource::Toeplitz(path)),
            (None, None) => Ok(ModelSource::None),
        }
    }

    fn load(&self) -> Result<Option<CovarianceModel>, CliError> {
        Ok(match self {
            ModelSource::Dense(path) => Some(CovarianceModel::from_csv_dense(&read_file("model_file", path)?)?),
            ModelSource::Toeplitz(path) => Some(CovarianceModel::from_toeplitz_line(&read_file("toeplitz_file", path)?)?),
            ModelSource::None => None,
        })
    }
}

struct SampleSource {
    path: String,
    a: Option<f64>,
}

impl SampleSource {
    fn read(params: &Params) -> Result<Self, CliError> {
        let path: String = params.require("sample")?;
        let a: Option<f64> = params.opt("a")?;
        if let Some(a) = a {
            check_a(a)?;
        }
        Ok(Self { path, a })
    }

    fn load(&self) -> Result<MaskedSample, CliError> {
        Ok(MaskedSample::from_csv(&read_file("sample", &self.path)?, self.a)?)
    }
}

fn json_line<T: Serialize>(out: &mut String, value: &T) {
    out.push_str(&serde_json::to_string(value).expect("serializable"));
    out.push('\n');
}

pub fn simulate(params: &Params, opts: &Options) -> Result<Output, CliError> {
    let master = seed(params, opts)?;
    let kind: String = params.get("model", "identity".to_string())?;
    let n: usize = params.require("n")?;
    let a: f64 = params.get("a", 1.0)?;
    check_a(a)?;
    let source = ModelSource::read(params)?;
    let p: Option<usize> = params.opt("p")?;
    let alpha: Option<f64> = params.opt("alpha")?;
    let phi: Option<f64> = params.opt("phi")?;
    let sign_seed: u64 = params.get("sign_seed", derive_seed(master, &[1]))?;
    let model_out: Option<String> = params.opt("model_out")?;
    params.finish()?;

    let model = match kind.as_str() {
        "file" => source.load()?.ok_or_else(|| CliError::config("model_file", "model = file needs model_file or toeplitz_file"))?,
        "identity" | "extremal_general" | "extremal_toeplitz" => {
            let p = p.ok_or_else(|| CliError::config("p", "missing required key"))?;
            if kind == "identity" {
                CovarianceModel::identity(p)?
            } else {
                let cp = ClassParams {
                    alpha: alpha.ok_or_else(|| CliError::config("alpha", "missing required key"))?,
                    phi: phi.ok_or_else(|| CliError::config("phi", "missing required key"))?,
                    a,
                    n,
                    p,
                };
                if kind == "extremal_general" {
                    construct_extremal_general(&cp, sign_seed)?
                } else {
                    construct_extremal_toeplitz(&cp, sign_seed)?
                }
            }
        }
        other => {
            return Err(CliError::config(
                "model",
                format!("expected identity|extremal_general|extremal_toeplitz|file, got {other:?}"),
            ))
        }
    };
    if let Some(path) = model_out {
        std::fs::write(&path, model.to_csv_dense()).map_err(|e| CliError::io("model_out", format!("{path}: {e}")))?;
    }
    let s = sample(&model, n, a, derive_seed(master, &[0]))?;
    let text = match opts.format {
        Format::Csv => s.to_csv(),
        Format::Jsonl => {
            let mut out = String::new();
            for (yr, mr) in s.y().rows().into_iter().zip(s.mask().rows()) {
                let row: Vec<Option<f64>> = yr.iter().zip(mr.iter()).map(|(&v, &e)| (e == 1).then_some(v)).collect();
                json_line(&mut out, &row);
            }
            out
        }
    };
    Ok(Output::ok(text))
}

#[derive(Serialize)]
struct StatRow {
    kind: &'static str,
    n: usize,
    p: usize,
    m: usize,
    a: f64,
    value: f64,
    standardized: f64,
}

pub fn stat(params: &Params, opts: &Options) -> Result<Output, CliError> {
    let kind: StatKind = params.get("kind", StatKind::General)?;
    let ms: Vec<usize> = params.require_list("m")?;
    let source = SampleSource::read(params)?;
    params.finish()?;
    let s = source.load()?;
    let results = statistic_levels(kind, &s, &ms)?;
    let mut out = String::new();
    if opts.format == Format::Csv {
        out.push_str("kind,n,p,m,a,value,standardized\n");
    }
    for r in results {
        let row = StatRow {
            kind: r.kind.as_str(),
            n: r.n,
            p: r.p,
            m: r.m,
            a: r.a,
            value: r.value,
            standardized: r.standardized,
        };
        match opts.format {
            Format::Csv => {
                let _ = writeln!(out, "{},{},{},{},{},{},{}", row.kind, row.n, row.p, row.m, row.a, row.value, row.standardized);
            }
            Format::Jsonl => json_line(&mut out, &row),
        }
    }
    Ok(Output::ok(out))
}

#[derive(Serialize)]
struct TestRow {
    kind: &'static str,
    mode: &'static str,
    n: usize,
    p: usize,
    a: f64,
    alpha: f64,
    phi: Option<f64>,
    m_or_grid: String,
    statistic: f64,
    threshold: f64,
    reject: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_level: Option<Vec<covtest_core::testing::LevelDecision>>,
}

fn render_test_row(row: &TestRow, format: Format) -> String {
    match format {
        Format::Csv => format!(
            "kind,mode,n,p,a,alpha,phi,m_or_grid,statistic,threshold,reject\n{},{},{},{},{},{},{},{},{},{},{}\n",
            row.kind,
            row.mode,
            row.n,
            row.p,
            row.a,
            row.alpha,
            row.phi.map(|v| v.to_string()).unwrap_or_default(),
            row.m_or_grid,
            row.statistic,
            row.threshold,
            row.reject
        ),
        Format::Jsonl => {
            let mut out = String::new();
            json_line(&mut out, row);
            out
        }
    }
}

pub fn test(params: &Params, opts: &Options) -> Result<Output, CliError> {
    let sample_source = SampleSource::read(params)?;
    let model_source = ModelSource::read(params)?;
    let kind: Option<StatKind> = params.opt("kind")?;
    let alpha: f64 = params.require("alpha")?;
    let phi: f64 = params.require("phi")?;
    let spec = threshold_spec(params)?;
    params.finish()?;
    let s = sample_source.load()?;
    let model = model_source.load()?;
    let kind = kind.unwrap_or(match &model {
        Some(m) if m.kind().is_toeplitz() => StatKind::Toeplitz,
        _ => StatKind::General,
    });
    if let Some(m) = &model {
        if m.dim() != s.p() {
            return Err(CliError::config(
                "model_file",
                format!("model dimension {} does not match sample p = {}", m.dim(), s.p()),
            ));
        }
    }
    spec.validate(kind)?;
    let m = choose_m(alpha, phi, spec.d_const, spec.k_const, s.p())?.m;
    let t = fixed_threshold(&spec, kind, alpha, phi, s.a(), s.n(), s.p(), m)?;
    let outcome = test_at_bandwidth(&s, kind, m, t)?;
    let row = TestRow {
        kind: kind.as_str(),
        mode: spec.mode.as_str(),
        n: s.n(),
        p: s.p(),
        a: s.a(),
        alpha,
        phi: Some(phi),
        m_or_grid: m.to_string(),
        statistic: outcome.statistic.value,
        threshold: outcome.threshold,
        reject: outcome.reject as u8,
        per_level: None,
    };
    Ok(Output::ok(render_test_row(&row, opts.format)))
}

pub fn adapt(params: &Params, opts: &Options) -> Result<Output, CliError> {
    let source = SampleSource::read(params)?;
    let kind: StatKind = params.get("kind", StatKind::General)?;
    let c_star: f64 = params.get("c_star", 4.5)?;
    let alpha_star: f64 = params.require("alpha_star")?;
    let alpha_star_np: Option<f64> = params.opt("alpha_star_np")?;
    params.finish()?;
    let s = source.load()?;
    let grid = build_grid(alpha_star, alpha_star_np, s.a(), s.n(), s.p(), c_star, kind)?;
    let outcome = test_adaptive(&s, &grid)?;
    let m_or_grid = grid.bandwidths().iter().map(usize::to_string).collect::<Vec<_>>().join(";");
    let row = TestRow {
        kind: kind.as_str(),
        mode: "adaptive",
        n: s.n(),
        p: s.p(),
        a: s.a(),
        alpha: alpha_star,
        phi: None,
        m_or_grid,
        statistic: outcome.statistic.value,
        threshold: outcome.threshold,
        reject: outcome.reject as u8,
        per_level: outcome.per_level,
    };
    Ok(Output::ok(render_test_row(&row, opts.format)))
}

fn runner(opts: &Options) -> Result<Runner, CliError> {
    Runner::new(opts.threads).map_err(|e| CliError::config("threads", e.to_string()))
}

fn render_rows(rows: &[SweepRow], format: Format) -> String {
    match format {
        Format::Csv => to_csv(rows),
        Format::Jsonl => {
            let mut out = String::new();
            for r in rows {
                json_line(&mut out, r);
            }
            out
        }
    }
}

fn procedure(params: &Params, kind: StatKind) -> Result<Procedure, CliError> {
    let name: String = params.get("procedure", "fixed".to_string())?;
    Ok(match name.as_str() {
        "fixed" => Procedure::Fixed {
            kind,
            spec: threshold_spec(params)?,
            cap_m: params.get("cap_m", false)?,
        },
        "adaptive" => Procedure::Adaptive {
            kind,
            c_star: params.get("c_star", 4.5)?,
            alpha_star: params.require("alpha_star")?,
            alpha_star_np: params.opt("alpha_star_np")?,
        },
        "always" => Procedure::AlwaysReject,
        "never" => Procedure::NeverReject,
        other => {
            return Err(CliError::config(
                "procedure",
                format!("expected fixed|adaptive|always|never, got {other:?}"),
            ))
        }
    })
}

/// The extremal alternative, or `None` plus the user model still to be loaded.
fn alternative(params: &Params, kind: StatKind) -> Result<(Option<Alternative>, ModelSource), CliError> {
    let default = match kind {
        StatKind::General => "extremal_general",
        StatKind::Toeplitz => "extremal_toeplitz",
    };
    let name: String = params.get("alternative", default.to_string())?;
    match name.as_str() {
        "extremal_general" => Ok((Some(Alternative::ExtremalGeneral), ModelSource::None)),
        "extremal_toeplitz" => Ok((Some(Alternative::ExtremalToeplitz), ModelSource::None)),
        "user" => match ModelSource::read(params)? {
            ModelSource::None => Err(CliError::config("alternative", "user alternative needs model_file or toeplitz_file")),
            source => Ok((None, source)),
        },
        other => Err(CliError::config(
            "alternative",
            format!("expected extremal_general|extremal_toeplitz|user, got {other:?}"),
        )),
    }
}

pub fn sweep(params: &Params, opts: &Options) -> Result<Output, CliError> {
    let kind: StatKind = params.get("kind", StatKind::General)?;
    let procedure = procedure(params, kind)?;
    let (alternative, alt_source) = alternative(params, kind)?;
    let rate_name: String = params.get("rate", "minimax".to_string())?;
    let rate_kind: StatKind = params.get("rate_kind", kind)?;
    let rate_base = match rate_name.as_str() {
        "minimax" => RateBase::Minimax(rate_kind),
        "adaptive" => RateBase::Adaptive(rate_kind),
        other => return Err(CliError::config("rate", format!("expected minimax|adaptive, got {other:?}"))),
    };
    let ns: Vec<usize> = params.require_list("n")?;
    let ps: Vec<usize> = params.require_list("p")?;
    let as_: Vec<f64> = params.list("a")?.unwrap_or_else(|| vec![1.0]);
    let alphas: Vec<f64> = params.list("alpha")?.unwrap_or_else(|| vec![1.0]);
    let cs: Vec<f64> = params.list("C")?.unwrap_or_else(|| vec![1.0]);
    for &a in &as_ {
        check_a(a)?;
    }
    let bisect: bool = params.get("bisect", false)?;
    let replications: usize = params.get("R", if bisect { 2000 } else { 10_000 })?;
    let master = seed(params, opts)?;
    let mut scenarios = Vec::new();
    for &n in &ns {
        for &p in &ps {
            for &a in &as_ {
                for &alpha in &alphas {
                    for &multiplier in &cs {
                        scenarios.push(Scenario {
                            n,
                            p,
                            a,
                            alpha,
                            multiplier,
                        });
                    }
                }
            }
        }
    }
    let mut plan = SweepPlan::new(scenarios, procedure, rate_base, Vec::new(), replications, master);
    plan.c_lo = params.get("c_lo", plan.c_lo)?;
    plan.c_hi = params.get("c_hi", plan.c_hi)?;
    plan.bisection_steps = params.get("steps", plan.bisection_steps)?;
    plan.gamma_target = params.get("gamma_target", plan.gamma_target)?;
    plan.record_timing = params.get("timing", false)?;
    params.finish()?;
    let alternative = match alternative {
        Some(alt) => alt,
        None => Alternative::User(alt_source.load()?.expect("user alternative has a model source")),
    };
    plan.alternatives.push(alternative);
    plan.validate(bisect)?;
    let runner = runner(opts)?;
    let rows = if bisect {
        rate_sweep(&plan, &runner)?
    } else {
        error_table(&plan, &runner)?
    };
    Ok(Output::ok(render_rows(&rows, opts.format)))
}

pub fn probe(params: &Params, opts: &Options) -> Result<Output, CliError> {
    let a: f64 = params.get("a", 1.0)?;
    check_a(a)?;
    let cfg = ProbeConfig {
        kind: params.get("kind", StatKind::General)?,
        alpha: params.get("alpha", 1.0)?,
        a,
        n: params.require("n")?,
        p: params.require("p")?,
        shrink: params
            .list("shrink")?
            .unwrap_or_else(|| vec![0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0]),
        spec: threshold_spec(params)?,
        replications: params.get("R", 1000)?,
        master_seed: seed(params, opts)?,
    };
    params.finish()?;
    let result = power_collapse_probe(&cfg, &runner(opts)?)?;
    eprintln!(
        "regime ratio p/(a^2 n)^(4 alpha - 1) = {:.4e}",
        result.regime_ratio
    );
    let mut text = render_rows(&result.rows, opts.format);
    if opts.format == Format::Jsonl {
        json_line(&mut text, &serde_json::json!({ "regime_ratio": result.regime_ratio }));
    }
    Ok(Output::ok(text))
}

pub fn selftest(params: &Params, opts: &Options) -> Result<Output, CliError> {
    let master = seed(params, opts)?;
    params.finish()?;
    let checks = run_selftest(master)?;
    let mut out = String::new();
    for c in &checks {
        match opts.format {
            Format::Csv => {
                let _ = writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Format::Jsonl => json_line(&mut out, c),
        }
    }
    Ok(Output {
        text: out,
        failed: checks.iter().any(|c| !c.passed),
    })
}
