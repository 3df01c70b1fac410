//! Special functions and dense symmetric linear algebra.

mod linalg;
mod special;

pub use linalg::{sym_inv_sqrt, sym_sqrt, DenseMatrix, SpdMatrix, PSD_TOLERANCE, SYMMETRY_TOLERANCE};
pub use special::{bessel_k, chi2_sf, gamma_fn, ln_gamma, normal_sf};
