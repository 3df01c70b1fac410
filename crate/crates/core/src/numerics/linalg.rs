//! Small dense matrix types and symmetric square roots.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Tolerated negative eigenvalue, relative to the largest one, before a
/// symmetric matrix is rejected as not positive semi-definite.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// Relative asymmetry tolerated by [`SpdMatrix::new`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Row-major dense matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::Contract("matrix dimensions must be positive".into()));
        }
        if n_rows * n_cols != data.len() {
            return Err(Error::Contract(format!(
                "{n_rows}x{n_cols} matrix needs {} entries, got {}",
                n_rows * n_cols,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Contract(format!("non-finite matrix entry at position {bad}")));
        }
        Ok(Self { n_rows, n_cols, data })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n_cols + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                t.data[j * self.n_rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.n_cols != rhs.n_rows {
            return Err(Error::Contract(format!(
                "cannot multiply {}x{} by {}x{}",
                self.n_rows, self.n_cols, rhs.n_rows, rhs.n_cols
            )));
        }
        Ok(Self::from_nalgebra(&(self.to_nalgebra() * rhs.to_nalgebra())))
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n_cols {
            return Err(Error::Contract(format!(
                "vector of length {} does not match {} columns",
                v.len(),
                self.n_cols
            )));
        }
        Ok(self
            .data
            .chunks_exact(self.n_cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n_rows, self.n_cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        let (n_rows, n_cols) = m.shape();
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                data.push(m[(i, j)]);
            }
        }
        Self { n_rows, n_cols, data }
    }
}

/// A square symmetric matrix intended to be a covariance.
///
/// Symmetry is checked on construction; positive semi-definiteness is
/// checked whenever the matrix is factorized.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix(DenseMatrix);

impl SpdMatrix {
    pub fn new(m: DenseMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Contract(format!(
                "covariance must be square, got {}x{}",
                m.n_rows, m.n_cols
            )));
        }
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        let n = m.n_rows;
        for i in 0..n {
            for j in (i + 1)..n {
                if (m.get(i, j) - m.get(j, i)).abs() > SYMMETRY_TOLERANCE * scale {
                    return Err(Error::Contract(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.n_rows
    }

    pub fn as_dense(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_dense(self) -> DenseMatrix {
        self.0
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0.to_nalgebra())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Checks λ_min ≥ −[`PSD_TOLERANCE`]·λ_max.
    pub fn check_psd(&self) -> Result<()> {
        let ev = self.eigenvalues();
        check_spectrum(&ev)
    }
}

fn check_spectrum(ev: &[f64]) -> Result<()> {
    let max = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -PSD_TOLERANCE * max.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Validity(format!(
            "matrix is not positive semi-definite (min eigenvalue {min:e}, max {max:e})"
        )));
    }
    Ok(())
}

fn reassemble(eig: &SymmetricEigen<f64, nalgebra::Dyn>, f: impl Fn(f64) -> f64) -> DenseMatrix {
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        scaled.column_mut(j).scale_mut(f(lambda));
    }
    let r = &scaled * v.transpose();
    let r = (&r + r.transpose()) * 0.5;
    DenseMatrix::from_nalgebra(&r)
}

/// Symmetric positive semi-definite square root via eigendecomposition.
/// Eigenvalues within the PSD tolerance of zero are clamped to zero.
pub fn sym_sqrt(m: &SpdMatrix) -> Result<DenseMatrix> {
    let eig = SymmetricEigen::new(m.0.to_nalgebra());
    let ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    check_spectrum(&ev)?;
    Ok(reassemble(&eig, |l| l.max(0.0).sqrt()))
}

/// Symmetric inverse square root of a positive definite matrix.
///
/// Fails with [`Error::Degenerate`] when the smallest eigenvalue is not
/// clearly positive relative to the largest.
pub fn sym_inv_sqrt(m: &SpdMatrix) -> Result<DenseMatrix> {
    let eig = SymmetricEigen::new(m.0.to_nalgebra());
    let max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || min <= 1e-12 * max {
        return Err(Error::Degenerate(format!(
            "covariance matrix is singular (eigenvalues in [{min:e}, {max:e}])"
        )));
    }
    Ok(reassemble(&eig, |l| 1.0 / l.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel_frob(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
        let diff: f64 = a
            .as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| (x - y).powi(2))
            .sum();
        diff.sqrt() / b.frobenius_norm()
    }

    #[test]
    fn identity_root() {
        let id = SpdMatrix::new(DenseMatrix::identity(3)).unwrap();
        let r = sym_sqrt(&id).unwrap();
        assert!(rel_frob(&r, &DenseMatrix::identity(3)) < 1e-14);
    }

    #[test]
    fn diagonal_root() {
        let m = SpdMatrix::new(DenseMatrix::from_diagonal(&[4.0, 9.0])).unwrap();
        let r = sym_sqrt(&m).unwrap();
        assert!(rel_frob(&r, &DenseMatrix::from_diagonal(&[2.0, 3.0])) < 1e-14);
    }

    #[test]
    fn random_spd_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 10;
        let a = DenseMatrix::new(n, n, (0..n * n).map(|_| rng.random::<f64>() - 0.5).collect()).unwrap();
        let m = a.matmul(&a.transpose()).unwrap();
        let spd = SpdMatrix::new(m.clone()).unwrap();
        let r = sym_sqrt(&spd).unwrap();
        assert!(rel_frob(&r, &r.transpose()) < 1e-14);
        let rr = r.matmul(&r).unwrap();
        assert!(rel_frob(&rr, &m) < 1e-8);

        let ri = sym_inv_sqrt(&spd).unwrap();
        let should_be_id = ri.matmul(&m).unwrap().matmul(&ri).unwrap();
        assert!(rel_frob(&should_be_id, &DenseMatrix::identity(n)) < 1e-8);
    }

    #[test]
    fn asymmetric_rejected() {
        let m = DenseMatrix::new(2, 2, vec![1.0, 0.5, 0.4, 1.0]).unwrap();
        assert!(matches!(SpdMatrix::new(m), Err(Error::Contract(_))));
        let rect = DenseMatrix::zeros(2, 3);
        assert!(SpdMatrix::new(rect).is_err());
    }

    #[test]
    fn indefinite_rejected_and_jitter_clamped() {
        let m = SpdMatrix::new(DenseMatrix::from_diagonal(&[1.0, -0.1])).unwrap();
        assert!(sym_sqrt(&m).is_err());
        let m = SpdMatrix::new(DenseMatrix::from_diagonal(&[1.0, -1e-10])).unwrap();
        let r = sym_sqrt(&m).unwrap();
        assert_eq!(r.get(1, 1), 0.0);
    }

    #[test]
    fn singular_inverse_root_is_degenerate() {
        let m = SpdMatrix::new(DenseMatrix::new(2, 2, vec![1.0, 1.0, 1.0, 1.0]).unwrap()).unwrap();
        assert!(matches!(sym_inv_sqrt(&m), Err(Error::Degenerate(_))));
    }

    #[test]
    fn construction_checks() {
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::new(1, 1, vec![f64::NAN]).is_err());
        assert!(DenseMatrix::new(0, 1, vec![]).is_err());
    }
}
