//! Gaussian sampling with a Bernoulli observation mask.
//!
//! One `u64` seed drives two independent ChaCha streams: stream 0 feeds the
//! standard normals, stream 1 feeds the mask. Masks therefore depend only on
//! `(seed, n, p, a)` and can be shared across covariance models.

use ndarray::Array2;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::covmodels::{validate_a, CovarianceModel};
use crate::error::{Error, Result};

const GAUSSIAN_STREAM: u64 = 0;
const MASK_STREAM: u64 = 1;

/// Observations `Y = mask * X` with their mask.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedSample {
    y: Array2<f64>,
    mask: Array2<u8>,
    a: f64,
    source_seed: u64,
}

impl MaskedSample {
    /// Wraps existing data; masked positions of `y` must be zero.
    pub fn from_parts(y: Array2<f64>, mask: Array2<u8>, a: f64) -> Result<Self> {
        validate_a(a)?;
        if y.dim() != mask.dim() {
            return Err(Error::DimensionMismatch {
                what: "mask shape vs data shape",
                expected: y.len(),
                got: mask.len(),
            });
        }
        for ((k, i), &e) in mask.indexed_iter() {
            match e {
                0 if y[[k, i]] != 0.0 => {
                    return Err(Error::invalid(
                        "y",
                        format!("nonzero value at masked position ({k}, {i})"),
                    ))
                }
                0 | 1 => {}
                _ => return Err(Error::invalid("mask", format!("entry {e} not in {{0,1}}"))),
            }
        }
        Ok(Self {
            y,
            mask,
            a,
            source_seed: 0,
        })
    }

    /// Any real matrix, treated as fully observed (`a = 1`).
    pub fn fully_observed(y: Array2<f64>) -> Self {
        let mask = Array2::from_elem(y.dim(), 1u8);
        Self {
            y,
            mask,
            a: 1.0,
            source_seed: 0,
        }
    }

    /// Same data, different nominal observation probability.
    pub fn with_a(mut self, a: f64) -> Result<Self> {
        validate_a(a)?;
        self.a = a;
        Ok(self)
    }

    pub fn y(&self) -> &Array2<f64> {
        &self.y
    }

    pub fn mask(&self) -> &Array2<u8> {
        &self.mask
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    pub fn p(&self) -> usize {
        self.y.ncols()
    }

    pub fn source_seed(&self) -> u64 {
        self.source_seed
    }

    /// CSV with one observation per line; masked entries are empty fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (yr, mr) in self.y.rows().into_iter().zip(self.mask.rows()) {
            let fields: Vec<String> = yr
                .iter()
                .zip(mr.iter())
                .map(|(x, &e)| if e == 1 { x.to_string() } else { String::new() })
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    /// Reads [`MaskedSample::to_csv`] output. Empty fields become mask 0.
    /// When `a` is `None` it is estimated from the mask.
    pub fn from_csv(text: &str, a: Option<f64>) -> Result<Self> {
        let mut values = Vec::new();
        let mut mask = Vec::new();
        let mut width = None;
        let mut rows = 0;
        for (ln, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            match width {
                None => width = Some(fields.len()),
                Some(w) if w != fields.len() => {
                    return Err(Error::Parse(format!(
                        "line {} has {} fields, expected {}",
                        ln + 1,
                        fields.len(),
                        w
                    )))
                }
                _ => {}
            }
            for f in fields {
                let f = f.trim();
                if f.is_empty() {
                    values.push(0.0);
                    mask.push(0u8);
                } else {
                    let v = f
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("line {}: bad number {f:?}: {e}", ln + 1)))?;
                    values.push(v);
                    mask.push(1u8);
                }
            }
            rows += 1;
        }
        let p = width.ok_or_else(|| Error::Parse("empty sample file".into()))?;
        let y = Array2::from_shape_vec((rows, p), values).map_err(|e| Error::Parse(e.to_string()))?;
        let mask = Array2::from_shape_vec((rows, p), mask).map_err(|e| Error::Parse(e.to_string()))?;
        let a = match a {
            Some(a) => a,
            None => {
                let est = mask.iter().filter(|&&e| e == 1).count() as f64 / mask.len() as f64;
                if est > 0.0 {
                    est
                } else {
                    return Err(Error::invalid("a", "no observed entries to estimate a from"));
                }
            }
        };
        Self::from_parts(y, mask, a)
    }
}

/// Draws `n` rows `X_k ~ N(0, Sigma)` through the model's Cholesky factor and
/// masks each coordinate independently with probability `1 - a`.
pub fn sample(model: &CovarianceModel, n: usize, a: f64, seed: u64) -> Result<MaskedSample> {
    if n == 0 {
        return Err(Error::invalid("n", "must be positive"));
    }
    validate_a(a)?;
    let p = model.dim();
    let factor = model.cholesky();

    let mut gauss = ChaCha8Rng::seed_from_u64(seed);
    gauss.set_stream(GAUSSIAN_STREAM);
    let mut coins = ChaCha8Rng::seed_from_u64(seed);
    coins.set_stream(MASK_STREAM);

    let mut y = Array2::<f64>::zeros((n, p));
    let mut mask = Array2::<u8>::zeros((n, p));
    let mut z = vec![0.0; p];
    let mut x = vec![0.0; p];
    for k in 0..n {
        for zi in z.iter_mut() {
            *zi = gauss.sample(StandardNormal);
        }
        factor.apply(&z, &mut x);
        let mut yrow = y.row_mut(k);
        let mut mrow = mask.row_mut(k);
        for i in 0..p {
            if coins.gen_bool(a) {
                mrow[i] = 1;
                yrow[i] = x[i];
            }
        }
    }
    Ok(MaskedSample {
        y,
        mask,
        a,
        source_seed: seed,
    })
}

/// Fraction of observed entries.
pub fn estimate_a(sample: &MaskedSample) -> f64 {
    let total = sample.mask.len();
    if total == 0 {
        return 0.0;
    }
    sample.mask.iter().filter(|&&e| e == 1).count() as f64 / total as f64
}

/// Deterministic child seed for `(master, path...)`, e.g.
/// `(master_seed, entry_index, replication_index)`. Up to three path
/// components are packed into a ChaCha key together with the master seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    assert!(path.len() <= 3, "seed path longer than 3 components");
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master.to_le_bytes());
    for (slot, part) in path.iter().enumerate() {
        key[8 * (slot + 1)..8 * (slot + 2)].copy_from_slice(&part.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    // distinguish paths that differ only by trailing zeros
    rng.set_stream(path.len() as u64);
    rng.next_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covmodels::{construct_extremal_general, ClassParams};
    use ndarray::array;

    #[test]
    fn full_observation_gives_all_ones_mask() {
        let id = CovarianceModel::identity(6).unwrap();
        let s = sample(&id, 50, 1.0, 9).unwrap();
        assert!(s.mask().iter().all(|&e| e == 1));
        assert_eq!(estimate_a(&s), 1.0);
    }

    #[test]
    fn observed_fraction_near_a() {
        let id = CovarianceModel::identity(5).unwrap();
        let s = sample(&id, 10_000, 0.5, 2024).unwrap();
        assert!((estimate_a(&s) - 0.5).abs() < 0.02);
    }

    #[test]
    fn masked_positions_are_zero() {
        let id = CovarianceModel::identity(8).unwrap();
        let s = sample(&id, 200, 0.3, 5).unwrap();
        for (y, &e) in s.y().iter().zip(s.mask().iter()) {
            if e == 0 {
                assert_eq!(*y, 0.0);
            }
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let id = CovarianceModel::identity(7).unwrap();
        assert_eq!(
            sample(&id, 30, 0.6, 77).unwrap(),
            sample(&id, 30, 0.6, 77).unwrap()
        );
        assert_ne!(
            sample(&id, 30, 0.6, 77).unwrap(),
            sample(&id, 30, 0.6, 78).unwrap()
        );
    }

    #[test]
    fn mask_does_not_depend_on_model() {
        let p = 30;
        let id = CovarianceModel::identity(p).unwrap();
        let alt = construct_extremal_general(
            &ClassParams {
                alpha: 1.0,
                phi: 0.1,
                a: 0.7,
                n: 40,
                p,
            },
            3,
        )
        .unwrap();
        let s0 = sample(&id, 40, 0.7, 1234).unwrap();
        let s1 = sample(&alt, 40, 0.7, 1234).unwrap();
        assert_eq!(s0.mask(), s1.mask());
        assert_ne!(s0.y(), s1.y());
    }

    #[test]
    fn rejects_bad_inputs() {
        let id = CovarianceModel::identity(3).unwrap();
        assert!(sample(&id, 0, 0.5, 1).is_err());
        assert!(sample(&id, 5, 0.0, 1).is_err());
        assert!(sample(&id, 5, 1.5, 1).is_err());
    }

    #[test]
    fn estimate_a_small_cases() {
        let zeros = MaskedSample::from_parts(Array2::zeros((2, 2)), Array2::zeros((2, 2)), 0.5).unwrap();
        assert_eq!(estimate_a(&zeros), 0.0);
        let half = MaskedSample::from_parts(
            array![[1.0, 0.0], [0.0, 2.0]],
            array![[1u8, 0], [0, 1]],
            0.5,
        )
        .unwrap();
        assert_eq!(estimate_a(&half), 0.5);
    }

    #[test]
    fn from_parts_rejects_value_under_mask() {
        assert!(MaskedSample::from_parts(array![[1.0]], array![[0u8]], 0.5).is_err());
    }

    #[test]
    fn csv_round_trip_preserves_mask() {
        let id = CovarianceModel::identity(4).unwrap();
        let s = sample(&id, 12, 0.5, 8).unwrap();
        let back = MaskedSample::from_csv(&s.to_csv(), Some(0.5)).unwrap();
        assert_eq!(back.y(), s.y());
        assert_eq!(back.mask(), s.mask());
        let est = MaskedSample::from_csv(&s.to_csv(), None).unwrap();
        assert_eq!(est.a(), estimate_a(&s));
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(1, &[0, 0]);
        let b = derive_seed(1, &[0, 1]);
        let c = derive_seed(1, &[1, 0]);
        let d = derive_seed(1, &[0]);
        assert!(a != b && a != c && b != c && a != d);
        assert_eq!(a, derive_seed(1, &[0, 0]));
    }
}
