//! Matérn correlations, the parsimonious bivariate Matérn cross-covariance,
//! and effective-range calibration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{bessel_k, ln_gamma, sym_sqrt, DenseMatrix, SpdMatrix};

use super::lattice::{LatticeField, LatticeSpec};

/// Correlation level that defines the effective range.
pub const EFFECTIVE_RANGE_LEVEL: f64 = 0.05;

/// Matérn correlation `2^{1-ν}/Γ(ν) (h/β)^ν K_ν(h/β)`, equal to 1 at `h = 0`.
pub fn matern_corr(h: f64, nu: f64, beta: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() || !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!(
            "matern_corr needs nu > 0 and beta > 0, got nu={nu}, beta={beta}"
        )));
    }
    if !(h >= 0.0) {
        return Err(Error::Domain(format!(
            "matern_corr needs a non-negative distance, got {h}"
        )));
    }
    if h == 0.0 {
        return Ok(1.0);
    }
    let t = h / beta;
    if nu == 0.5 {
        return Ok((-t).exp());
    }
    let k = bessel_k(nu, t)?;
    if k == 0.0 {
        return Ok(0.0);
    }
    let log_c = (1.0 - nu) * std::f64::consts::LN_2 - ln_gamma(nu)? + nu * t.ln() + k.ln();
    Ok(log_c.exp().min(1.0))
}

/// Upper bound on |ρ₁₂| for which the parsimonious bivariate Matérn model
/// with smoothnesses `nu1`, `nu2` is valid in dimension `d`.
pub fn rho_bound(nu1: f64, nu2: f64, d: u32) -> Result<f64> {
    if !(nu1 > 0.0) || !(nu2 > 0.0) || d == 0 {
        return Err(Error::Domain(format!(
            "rho_bound needs positive smoothness and dimension, got ({nu1}, {nu2}, {d})"
        )));
    }
    let half_d = 0.5 * d as f64;
    let nu12 = 0.5 * (nu1 + nu2);
    let a1 = ln_gamma(nu1 + half_d)? - ln_gamma(nu1)?;
    let a2 = ln_gamma(nu2 + half_d)? - ln_gamma(nu2)?;
    let a12 = ln_gamma(nu12 + half_d)? - ln_gamma(nu12)?;
    Ok((0.5 * (a1 + a2) - a12).exp())
}

/// Marginal parameters of one Matérn component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaternParams {
    pub sigma2: f64,
    pub nu: f64,
    pub beta: f64,
}

impl MaternParams {
    pub fn new(sigma2: f64, nu: f64, beta: f64) -> Result<Self> {
        let p = Self { sigma2, nu, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("sigma2", self.sigma2), ("nu", self.nu), ("beta", self.beta)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Validity(format!("Matérn {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Parsimonious bivariate Matérn model: shared range, separate smoothness,
/// cross-smoothness (ν₁+ν₂)/2 and colocated correlation ρ₁₂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariateMaternModel {
    pub var1: MaternParams,
    pub var2: MaternParams,
    pub rho12: f64,
    #[serde(default = "default_dim")]
    pub dim_d: u32,
}

fn default_dim() -> u32 {
    2
}

impl BivariateMaternModel {
    pub fn new(var1: MaternParams, var2: MaternParams, rho12: f64) -> Result<Self> {
        let m = Self {
            var1,
            var2,
            rho12,
            dim_d: 2,
        };
        m.validate()?;
        Ok(m)
    }

    /// Unit variances, common smoothness `nu`, range `beta`.
    pub fn standard(nu: f64, beta: f64, rho12: f64) -> Result<Self> {
        let p = MaternParams::new(1.0, nu, beta)?;
        Self::new(p, p, rho12)
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        self.var1.beta = beta;
        self.var2.beta = beta;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.var1.validate()?;
        self.var2.validate()?;
        if self.var1.beta != self.var2.beta {
            return Err(Error::Validity(format!(
                "parsimonious model needs a shared range, got {} and {}",
                self.var1.beta, self.var2.beta
            )));
        }
        let bound = rho_bound(self.var1.nu, self.var2.nu, self.dim_d)?;
        if !self.rho12.is_finite() || self.rho12.abs() > bound * (1.0 + 1e-12) {
            return Err(Error::Validity(format!(
                "colocated correlation {} exceeds the validity bound {bound}",
                self.rho12
            )));
        }
        Ok(())
    }

    /// Cross-covariances (C11, C22, C12) at distance `h`.
    pub fn covariances(&self, h: f64) -> Result<(f64, f64, f64)> {
        let beta = self.var1.beta;
        let c11 = self.var1.sigma2 * matern_corr(h, self.var1.nu, beta)?;
        let c22 = self.var2.sigma2 * matern_corr(h, self.var2.nu, beta)?;
        let cross_nu = 0.5 * (self.var1.nu + self.var2.nu);
        let c12 = self.rho12 * (self.var1.sigma2 * self.var2.sigma2).sqrt() * matern_corr(h, cross_nu, beta)?;
        Ok((c11, c22, c12))
    }
}

/// Stacked `(Z₁ᵀ, Z₂ᵀ)ᵀ` covariance of the bivariate model at arbitrary sites.
pub fn cross_covariance_at_sites(model: &BivariateMaternModel, sites: &[(f64, f64)]) -> Result<SpdMatrix> {
    model.validate()?;
    let n = sites.len();
    if n == 0 {
        return Err(Error::Contract("no sites".into()));
    }
    let mut m = DenseMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in i..n {
            let h = (sites[i].0 - sites[j].0).hypot(sites[i].1 - sites[j].1);
            let (c11, c22, c12) = model.covariances(h)?;
            for (a, b, v) in [(i, j, c11), (n + i, n + j, c22), (i, n + j, c12), (j, n + i, c12)] {
                m.set(a, b, v);
                m.set(b, a, v);
            }
        }
    }
    SpdMatrix::new(m)
}

/// Covariance of the stacked bivariate field on a lattice.
pub fn build_cross_covariance(model: &BivariateMaternModel, lattice: &LatticeSpec) -> Result<SpdMatrix> {
    model.validate()?;
    // Covariances depend only on the lag (|dx|, |dy|); tabulate them once.
    let (nx, ny) = (lattice.n_x, lattice.n_y);
    let mut table = Vec::with_capacity(nx * ny);
    for dy in 0..ny {
        for dx in 0..nx {
            let h = (dx as f64 * lattice.spacing).hypot(dy as f64 * lattice.spacing);
            table.push(model.covariances(h)?);
        }
    }
    let n = lattice.n_sites();
    let mut m = DenseMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let (ix, iy) = (i % nx, i / nx);
        for j in 0..n {
            let (jx, jy) = (j % nx, j / nx);
            let (c11, c22, c12) = table[ix.abs_diff(jx) + nx * iy.abs_diff(jy)];
            m.set(i, j, c11);
            m.set(n + i, n + j, c22);
            m.set(i, n + j, c12);
            m.set(n + i, j, c12);
        }
    }
    SpdMatrix::new(m)
}

/// `sym_sqrt(cov) · noise`, un-stacked into `p` variables.
pub fn sample_field(cov: &SpdMatrix, noise: &[f64], spec: &LatticeSpec, p: usize) -> Result<LatticeField> {
    let root = sym_sqrt(cov)?;
    sample_field_with_root(&root, noise, spec, p)
}

/// As [`sample_field`] with a precomputed square root.
pub fn sample_field_with_root(root: &DenseMatrix, noise: &[f64], spec: &LatticeSpec, p: usize) -> Result<LatticeField> {
    let dim = p * spec.n_sites();
    if root.n_rows() != dim || root.n_cols() != dim {
        return Err(Error::Contract(format!(
            "covariance is {}x{}, expected {dim}x{dim} for p={p} on {} sites",
            root.n_rows(),
            root.n_cols(),
            spec.n_sites()
        )));
    }
    if noise.len() != dim {
        return Err(Error::Contract(format!(
            "noise has length {}, expected {dim}",
            noise.len()
        )));
    }
    LatticeField::new(*spec, p, root.matvec(noise)?)
}

/// Correlation families calibrated by effective range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationFamily {
    /// Matérn with ν = 1/2: `exp(-h/β)`.
    Exponential,
    /// Matérn with ν = 1: `(h/β) K₁(h/β)`.
    Whittle,
}

impl CorrelationFamily {
    pub fn nu(self) -> f64 {
        match self {
            Self::Exponential => 0.5,
            Self::Whittle => 1.0,
        }
    }

    pub fn corr(self, h: f64, beta: f64) -> Result<f64> {
        matern_corr(h, self.nu(), beta)
    }
}

/// Range β at which the family's correlation equals 0.05 at distance `h_star`.
pub fn solve_effective_range(family: CorrelationFamily, h_star: f64) -> Result<f64> {
    if !(h_star > 0.0) || !h_star.is_finite() {
        return Err(Error::Domain(format!("effective range must be positive, got {h_star}")));
    }
    match family {
        CorrelationFamily::Exponential => Ok(h_star / (1.0 / EFFECTIVE_RANGE_LEVEL).ln()),
        CorrelationFamily::Whittle => {
            let resid = |beta: f64| -> Result<f64> { Ok(family.corr(h_star, beta)? - EFFECTIVE_RANGE_LEVEL) };
            // Correlation at h* increases with β.
            let (mut lo, mut hi) = (h_star / 20.0, 20.0 * h_star);
            let (f_lo, f_hi) = (resid(lo)?, resid(hi)?);
            if !(f_lo < 0.0 && f_hi > 0.0) {
                return Err(Error::Numerical(format!(
                    "effective-range bracket [{lo}, {hi}] does not contain a root (residuals {f_lo}, {f_hi})"
                )));
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let f = resid(mid)?;
                if f.abs() <= 1e-12 || hi - lo <= f64::EPSILON * mid {
                    return Ok(mid);
                }
                if f < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let mid = 0.5 * (lo + hi);
            if resid(mid)?.abs() <= 1e-10 {
                Ok(mid)
            } else {
                Err(Error::Numerical("effective-range bisection did not converge".into()))
            }
        }
    }
}
