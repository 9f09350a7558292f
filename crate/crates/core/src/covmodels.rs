//! Covariance models: the general Sobolev-type ellipsoid class, its Toeplitz
//! sub-class, and the randomized banded matrices that are hardest to tell
//! apart from the identity.
//!
//! A [`CovarianceModel`] is validated on construction (square, symmetric, unit
//! diagonal, positive definite), and keeps the Cholesky factor that certified
//! positive definiteness so the sampler never factorizes twice.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cholesky::CholeskyFactor;
use crate::error::{Error, Result};
use crate::summation::CompensatedSum;

const SYMMETRY_TOL: f64 = 1e-12;
const TOEPLITZ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Identity,
    GeneralEllipsoid,
    Toeplitz,
    ExtremalGeneral,
    ExtremalToeplitz,
}

impl ModelKind {
    /// Whether the kind promises Toeplitz structure.
    pub fn is_toeplitz(self) -> bool {
        matches!(
            self,
            ModelKind::Identity | ModelKind::Toeplitz | ModelKind::ExtremalToeplitz
        )
    }
}

/// Symmetric positive definite correlation matrix.
#[derive(Debug, Clone)]
pub struct CovarianceModel {
    entries: Array2<f64>,
    kind: ModelKind,
    factor: CholeskyFactor,
}

impl PartialEq for CovarianceModel {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.entries == other.entries
    }
}

impl CovarianceModel {
    /// Validates and wraps a matrix. Toeplitz kinds are checked structurally.
    pub fn from_matrix(entries: Array2<f64>, kind: ModelKind) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::invalid("p", "dimension must be positive"));
        }
        check_symmetric(&entries)?;
        for i in 0..rows {
            let d = entries[[i, i]];
            if d != 1.0 {
                return Err(Error::NonUnitDiagonal { index: i, value: d });
            }
        }
        if kind.is_toeplitz() {
            check_toeplitz(&entries)?;
        }
        let factor = CholeskyFactor::factorize(&entries)?;
        Ok(Self {
            entries,
            kind,
            factor,
        })
    }

    /// Builds a model and picks the most specific kind the entries satisfy.
    pub fn infer(entries: Array2<f64>) -> Result<Self> {
        let kind = if is_identity(&entries) {
            ModelKind::Identity
        } else if entries.nrows() == entries.ncols() && check_toeplitz(&entries).is_ok() {
            ModelKind::Toeplitz
        } else {
            ModelKind::GeneralEllipsoid
        };
        Self::from_matrix(entries, kind)
    }

    pub fn identity(p: usize) -> Result<Self> {
        Self::from_matrix(Array2::eye(p), ModelKind::Identity)
    }

    /// Toeplitz matrix from its first row `sigma_0, ..., sigma_{p-1}`.
    pub fn toeplitz(first_row: &[f64]) -> Result<Self> {
        Self::from_matrix(toeplitz_matrix(first_row), ModelKind::Toeplitz)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn cholesky(&self) -> &CholeskyFactor {
        &self.factor
    }

    /// First row of a Toeplitz model.
    pub fn toeplitz_row(&self) -> Result<Vec<f64>> {
        check_toeplitz(&self.entries)?;
        Ok(self.entries.row(0).to_vec())
    }

    /// Dense CSV: one matrix row per line, comma separated.
    pub fn to_csv_dense(&self) -> String {
        let mut out = String::new();
        for row in self.entries.rows() {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv_dense(text: &str) -> Result<Self> {
        let rows: Vec<Vec<f64>> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(parse_row)
            .collect::<Result<_>>()?;
        let p = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != p {
                return Err(Error::Parse(format!(
                    "row {} has {} fields, expected {}",
                    i + 1,
                    r.len(),
                    p
                )));
            }
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        let entries = Array2::from_shape_vec((p, p), flat)
            .map_err(|e| Error::Parse(e.to_string()))?;
        Self::infer(entries)
    }

    /// Compact Toeplitz form: a single line `sigma_0,...,sigma_{p-1}`.
    pub fn to_toeplitz_line(&self) -> Result<String> {
        let row = self.toeplitz_row()?;
        let fields: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        Ok(fields.join(",") + "\n")
    }

    pub fn from_toeplitz_line(text: &str) -> Result<Self> {
        let line = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty())
            .ok_or_else(|| Error::Parse("empty Toeplitz file".into()))?;
        let row = parse_row(line)?;
        let entries = toeplitz_matrix(&row);
        if is_identity(&entries) {
            Self::from_matrix(entries, ModelKind::Identity)
        } else {
            Self::from_matrix(entries, ModelKind::Toeplitz)
        }
    }
}

fn parse_row(line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number {:?}: {}", f.trim(), e)))
        })
        .collect()
}

fn toeplitz_matrix(first_row: &[f64]) -> Array2<f64> {
    let p = first_row.len();
    Array2::from_shape_fn((p, p), |(i, j)| first_row[i.abs_diff(j)])
}

fn is_identity(m: &Array2<f64>) -> bool {
    m.nrows() == m.ncols()
        && m.indexed_iter()
            .all(|((i, j), &x)| if i == j { x == 1.0 } else { x == 0.0 })
}

fn check_symmetric(m: &Array2<f64>) -> Result<()> {
    let p = m.nrows();
    for i in 0..p {
        for j in (i + 1)..p {
            let (x, y) = (m[[i, j]], m[[j, i]]);
            if (x - y).abs() > SYMMETRY_TOL * (1.0 + x.abs().max(y.abs())) || x.is_nan() {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }
    Ok(())
}

fn check_toeplitz(m: &Array2<f64>) -> Result<()> {
    let p = m.nrows();
    for i in 1..p {
        for j in 1..p {
            if (m[[i, j]] - m[[i - 1, j - 1]]).abs() > TOEPLITZ_TOL {
                return Err(Error::NotToeplitz { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Parameters of the alternative classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    pub alpha: f64,
    pub phi: f64,
    pub a: f64,
    pub n: usize,
    pub p: usize,
}

impl ClassParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::invalid("alpha", format!("must be > 0, got {}", self.alpha)));
        }
        if !(self.phi >= 0.0) || !self.phi.is_finite() {
            return Err(Error::invalid("phi", format!("must be >= 0, got {}", self.phi)));
        }
        validate_a(self.a)?;
        if self.n == 0 {
            return Err(Error::invalid("n", "must be positive"));
        }
        if self.p == 0 {
            return Err(Error::invalid("p", "must be positive"));
        }
        Ok(())
    }
}

pub(crate) fn validate_a(a: f64) -> Result<()> {
    if a > 0.0 && a <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("a", format!("must lie in (0,1], got {a}")))
    }
}

/// Result of a class-membership check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MembershipReport {
    pub in_ellipsoid: bool,
    /// `(1/p) sum_{i<j} s_ij^2 |i-j|^{2 alpha}` (general) or
    /// `sum_j s_j^2 j^{2 alpha}` (Toeplitz).
    pub ellipsoid_value: f64,
    /// `(1/p) sum_{i<j} s_ij^2` (general) or `sum_j s_j^2` (Toeplitz).
    pub energy: f64,
    /// `(1/2) sum_{i<j} s_ij^2`, the normalization used by the adaptive
    /// alternative for general matrices. `None` for Toeplitz reports.
    pub half_energy: Option<f64>,
    pub in_alternative: bool,
}

pub fn membership_general(model: &CovarianceModel, params: &ClassParams) -> Result<MembershipReport> {
    params.validate()?;
    let p = model.dim();
    if p != params.p {
        return Err(Error::DimensionMismatch {
            what: "model dimension vs p",
            expected: params.p,
            got: p,
        });
    }
    let m = model.entries();
    let mut weighted = CompensatedSum::new();
    let mut plain = CompensatedSum::new();
    for i in 0..p {
        for j in (i + 1)..p {
            let s2 = m[[i, j]] * m[[i, j]];
            if s2 != 0.0 {
                plain.add(s2);
                weighted.add(s2 * ((j - i) as f64).powf(2.0 * params.alpha));
            }
        }
    }
    let ellipsoid_value = weighted.value() / p as f64;
    let energy = plain.value() / p as f64;
    // unit diagonal and PD are guaranteed by CovarianceModel
    let in_ellipsoid = ellipsoid_value <= 1.0;
    Ok(MembershipReport {
        in_ellipsoid,
        ellipsoid_value,
        energy,
        half_energy: Some(0.5 * plain.value()),
        in_alternative: in_ellipsoid && energy >= params.phi * params.phi,
    })
}

pub fn membership_toeplitz(model: &CovarianceModel, params: &ClassParams) -> Result<MembershipReport> {
    params.validate()?;
    let p = model.dim();
    if p != params.p {
        return Err(Error::DimensionMismatch {
            what: "model dimension vs p",
            expected: params.p,
            got: p,
        });
    }
    let row = model.toeplitz_row()?;
    let mut weighted = CompensatedSum::new();
    let mut plain = CompensatedSum::new();
    for (j, s) in row.iter().enumerate().skip(1) {
        let s2 = s * s;
        plain.add(s2);
        weighted.add(s2 * (j as f64).powf(2.0 * params.alpha));
    }
    let ellipsoid_value = weighted.value();
    let energy = plain.value();
    let in_ellipsoid = ellipsoid_value <= 1.0 && row[0] == 1.0;
    Ok(MembershipReport {
        in_ellipsoid,
        ellipsoid_value,
        energy,
        half_energy: None,
        in_alternative: in_ellipsoid && energy >= params.phi * params.phi,
    })
}

/// Magnitude, band and sign seed of a randomized banded alternative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremalSpec {
    /// Off-diagonal magnitude `phi^{1 + 1/(2 alpha)}`.
    pub sigma_offdiag: f64,
    /// `T = ceil(phi^{-1/alpha})`; entries live on offsets `1 < |i-j| < T`.
    pub band_halfwidth: usize,
    pub sign_seed: u64,
}

impl ExtremalSpec {
    pub fn new(alpha: f64, phi: f64, sign_seed: u64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::invalid("alpha", format!("must be > 0, got {alpha}")));
        }
        if !(phi > 0.0) || !phi.is_finite() {
            return Err(Error::invalid("phi", format!("must be > 0, got {phi}")));
        }
        let sigma = phi.powf(1.0 + 1.0 / (2.0 * alpha));
        let t = phi.powf(-1.0 / alpha).ceil();
        if !t.is_finite() || t > (usize::MAX / 4) as f64 {
            return Err(Error::invalid("phi", "band width overflows"));
        }
        let band = (t as usize).max(1);
        let bound = 2.0 * (band as f64 - 1.0) * sigma;
        if bound >= 1.0 {
            return Err(Error::PhiTooLarge {
                sigma,
                band,
                bound,
            });
        }
        Ok(Self {
            sigma_offdiag: sigma,
            band_halfwidth: band,
            sign_seed,
        })
    }

    /// Whether offset `d = |i-j|` carries a signed entry.
    pub fn in_band(&self, d: usize) -> bool {
        d > 1 && d < self.band_halfwidth
    }
}

fn rademacher(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// `[S]_ij = 1{i=j} + u_ij sigma 1{1 < |i-j| < T}` with i.i.d. symmetric signs.
pub fn construct_extremal_general(params: &ClassParams, seed: u64) -> Result<CovarianceModel> {
    params.validate()?;
    let spec = ExtremalSpec::new(params.alpha, params.phi, seed)?;
    let p = params.p;
    let mut m = Array2::eye(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..p {
        for j in (i + 2)..p.min(i + spec.band_halfwidth) {
            let v = rademacher(&mut rng) * spec.sigma_offdiag;
            m[[i, j]] = v;
            m[[j, i]] = v;
        }
    }
    let kind = if spec.band_halfwidth <= 2 || p <= 2 {
        ModelKind::Identity
    } else {
        ModelKind::ExtremalGeneral
    };
    CovarianceModel::from_matrix(m, kind)
}

/// Toeplitz analog of [`construct_extremal_general`]: one sign per diagonal.
pub fn construct_extremal_toeplitz(params: &ClassParams, seed: u64) -> Result<CovarianceModel> {
    params.validate()?;
    let spec = ExtremalSpec::new(params.alpha, params.phi, seed)?;
    let p = params.p;
    let mut row = vec![0.0; p];
    row[0] = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (d, r) in row.iter_mut().enumerate().take(p.min(spec.band_halfwidth)).skip(2) {
        debug_assert!(spec.in_band(d));
        *r = rademacher(&mut rng) * spec.sigma_offdiag;
    }
    let kind = if row.iter().skip(1).all(|&x| x == 0.0) {
        ModelKind::Identity
    } else {
        ModelKind::ExtremalToeplitz
    };
    CovarianceModel::from_matrix(toeplitz_matrix(&row), kind)
}

/// `C(alpha) = (2 alpha + 1) / (4 alpha + 1)^{1 + 1/(2 alpha)}`.
pub fn extremal_constant(alpha: f64) -> f64 {
    (2.0 * alpha + 1.0) / (4.0 * alpha + 1.0).powf(1.0 + 1.0 / (2.0 * alpha))
}

/// Asymptotic value `C(alpha)^{1/2} phi^{2 + 1/(2 alpha)}` of the extremal
/// problem over the alternative class.
pub fn extremal_value(params: &ClassParams) -> Result<f64> {
    if !(params.alpha > 0.0) {
        return Err(Error::invalid("alpha", format!("must be > 0, got {}", params.alpha)));
    }
    if !(params.phi > 0.0) {
        return Err(Error::invalid("phi", format!("must be > 0, got {}", params.phi)));
    }
    Ok(extremal_constant(params.alpha).sqrt() * params.phi.powf(2.0 + 1.0 / (2.0 * params.alpha)))
}
