//! Banded Cholesky factorization.
//!
//! The extremal covariance constructions are banded, and the Cholesky factor
//! of a banded SPD matrix has the same lower bandwidth, so both the
//! factorization and the sampling map `z -> L z` cost O(p * bandwidth)
//! instead of O(p^3) and O(p^2). Dense matrices are the special case
//! `bandwidth = p - 1`.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor `L` with `A = L L^T`, stored by row over
/// the band `max(0, i - bandwidth) ..= i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    dim: usize,
    bandwidth: usize,
    // row i occupies band[i * (bandwidth + 1) ..][..bandwidth + 1];
    // slot s holds column i - bandwidth + s.
    band: Vec<f64>,
}

/// Largest `|i - j|` with a nonzero entry.
pub fn lower_bandwidth(matrix: &Array2<f64>) -> usize {
    let p = matrix.nrows();
    let mut bw = 0;
    for i in 0..p {
        for j in 0..i {
            if matrix[[i, j]] != 0.0 || matrix[[j, i]] != 0.0 {
                bw = bw.max(i - j);
                break;
            }
        }
    }
    bw
}

impl CholeskyFactor {
    /// Factorizes a symmetric matrix, reading only its lower triangle.
    /// Fails with [`Error::NotPositiveDefinite`] at the first nonpositive pivot.
    pub fn factorize(matrix: &Array2<f64>) -> Result<Self> {
        let (rows, cols) = matrix.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        let p = rows;
        let bw = lower_bandwidth(matrix);
        let width = bw + 1;
        let mut band = vec![0.0; p * width];
        let at = |i: usize, j: usize| i * width + (j + bw - i);

        for i in 0..p {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut s = matrix[[i, j]];
                // columns shared by rows i and j inside both bands
                for k in lo.max(j.saturating_sub(bw))..j {
                    s -= band[at(i, k)] * band[at(j, k)];
                }
                if i == j {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite { pivot: i, value: s });
                    }
                    band[at(i, i)] = s.sqrt();
                } else {
                    band[at(i, j)] = s / band[at(j, j)];
                }
            }
        }

        Ok(Self {
            dim: p,
            bandwidth: bw,
            band,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Entry `L[i][j]` (zero outside the band).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i || i - j > self.bandwidth {
            0.0
        } else {
            self.band[i * (self.bandwidth + 1) + (j + self.bandwidth - i)]
        }
    }

    /// Writes `L z` into `out`.
    pub fn apply(&self, z: &[f64], out: &mut [f64]) {
        assert_eq!(z.len(), self.dim);
        assert_eq!(out.len(), self.dim);
        let bw = self.bandwidth;
        let width = bw + 1;
        if bw == 0 {
            for ((o, &zi), &l) in out.iter_mut().zip(z).zip(self.band.iter()) {
                *o = l * zi;
            }
            return;
        }
        for (i, o) in out.iter_mut().enumerate() {
            let lo = i.saturating_sub(bw);
            let row = &self.band[i * width + (lo + bw - i)..(i + 1) * width];
            *o = row.iter().zip(&z[lo..=i]).map(|(l, x)| l * x).sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn reconstruct(f: &CholeskyFactor) -> Array2<f64> {
        let p = f.dim();
        Array2::from_shape_fn((p, p), |(i, j)| {
            (0..p).map(|k| f.get(i, k) * f.get(j, k)).sum::<f64>()
        })
    }

    #[test]
    fn identity_has_zero_bandwidth() {
        let f = CholeskyFactor::factorize(&Array2::eye(5)).unwrap();
        assert_eq!(f.bandwidth(), 0);
        assert_eq!(f.get(3, 3), 1.0);
    }

    #[test]
    fn reconstructs_banded_matrix() {
        let a = array![
            [1.0, 0.0, 0.2, 0.0],
            [0.0, 1.0, 0.0, -0.2],
            [0.2, 0.0, 1.0, 0.0],
            [0.0, -0.2, 0.0, 1.0]
        ];
        let f = CholeskyFactor::factorize(&a).unwrap();
        assert_eq!(f.bandwidth(), 2);
        let r = reconstruct(&f);
        for (x, y) in r.iter().zip(a.iter()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_indefinite() {
        let a = array![[1.0, 1.5], [1.5, 1.0]];
        assert!(matches!(
            CholeskyFactor::factorize(&a),
            Err(Error::NotPositiveDefinite { pivot: 1, .. })
        ));
    }

    #[test]
    fn apply_matches_dense_product() {
        let a = array![[1.0, 0.5, 0.1], [0.5, 1.0, 0.3], [0.1, 0.3, 1.0]];
        let f = CholeskyFactor::factorize(&a).unwrap();
        let z = [0.3, -1.2, 2.0];
        let mut out = [0.0; 3];
        f.apply(&z, &mut out);
        for i in 0..3 {
            let want: f64 = (0..3).map(|j| f.get(i, j) * z[j]).sum();
            assert!((out[i] - want).abs() < 1e-15);
        }
    }
}
