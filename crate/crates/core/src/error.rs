use thiserror::Error;

/// Errors raised by the library. Every variant names the offending
/// quantity so callers can surface it verbatim.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("diagonal entry {index} is {value}, expected 1")]
    NonUnitDiagonal { index: usize, value: f64 },

    #[error("matrix not positive definite (Cholesky pivot {pivot} is {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("matrix is not Toeplitz: entry ({row}, {col}) differs along its diagonal")]
    NotToeplitz { row: usize, col: usize },

    #[error("phi too large for extremal construction: 2(T-1)sigma = {bound:.6} >= 1 (sigma = {sigma:.6}, T = {band})")]
    PhiTooLarge { sigma: f64, band: usize, bound: f64 },

    #[error("bandwidth exceeds dimension: m = {m} >= p = {p}")]
    BandwidthExceedsDimension { m: usize, p: usize },

    #[error("grid exceeds dimension, reduce alpha range or increase p: 2^{level} >= p = {p}")]
    GridExceedsDimension { level: u32, p: usize },

    #[error("empty adaptive grid: L_* = {lower} > L^* = {upper}")]
    EmptyGrid { lower: u32, upper: u32 },

    #[error("threshold constant {constant} violates bound B = {bound:.6}")]
    ThresholdConstant { constant: f64, bound: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
