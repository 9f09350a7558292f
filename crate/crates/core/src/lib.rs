//! Tests for the identity of a high-dimensional covariance matrix from
//! Gaussian vectors whose coordinates are each observed with probability `a`.
//!
//! * [`covmodels`]: covariance classes, membership checks, extremal
//!   banded alternatives.
//! * [`sampling`]: Gaussian vectors with a Bernoulli observation mask.
//! * [`statistics`]: the general and Toeplitz U-statistics and their moments.
//! * [`testing`]: fixed-bandwidth tests, separation rates, adaptive tests.
//! * [`experiments`]: Monte Carlo error estimates, rate sweeps, probes.
//! * [`selftest`]: oracle and null-moment checks behind `covtest selftest`.

pub mod cholesky;
pub mod covmodels;
pub mod error;
pub mod experiments;
pub mod sampling;
pub mod selftest;
pub mod statistics;
pub mod summation;
pub mod testing;

pub use error::{Error, Result};
