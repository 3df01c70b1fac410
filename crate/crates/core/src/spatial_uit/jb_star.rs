use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::iid_tests::central_moments;

use super::series::{standardize, GriddedSeries};
use super::variance::{variance_estimators, KernelSpec, VarianceEstimates};

/// Spatially adjusted Jarque–Bera statistic for one gridded series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JbStarOutcome {
    /// `√n · m₃/m₂^{3/2}`.
    pub s_n: f64,
    /// `√n · (m₄/m₂² − 3)`.
    pub k_n: f64,
    pub phi_s2: f64,
    pub phi_k2: f64,
    pub statistic: f64,
    /// `exp(−statistic/2)`, the χ²₂ survival function.
    pub p_value: f64,
    pub reject: bool,
    pub skewness_fallback: bool,
    pub kurtosis_fallback: bool,
}

/// `JB* = S_n²/φ̂_S² + K_n²/φ̂_K²`, asymptotically χ²₂ under normality.
pub fn jb_star(series: &GriddedSeries, kernel: &KernelSpec, alpha: f64) -> Result<JbStarOutcome> {
    let z = standardize(series)?;
    let est = variance_estimators(&z, kernel)?;
    Ok(jb_star_from_parts(&z, est, alpha))
}

pub(crate) fn jb_star_from_parts(z: &GriddedSeries, est: VarianceEstimates, alpha: f64) -> JbStarOutcome {
    let (m2, m3, m4) = central_moments(z.values());
    let root_n = (z.len() as f64).sqrt();
    let s_n = root_n * m3 / m2.powf(1.5);
    let k_n = root_n * (m4 / (m2 * m2) - 3.0);
    let statistic = s_n * s_n / est.phi_s2 + k_n * k_n / est.phi_k2;
    let p_value = (-0.5 * statistic).exp();
    JbStarOutcome {
        s_n,
        k_n,
        phi_s2: est.phi_s2,
        phi_k2: est.phi_k2,
        statistic,
        p_value,
        reject: p_value < alpha,
        skewness_fallback: est.skewness_fallback,
        kurtosis_fallback: est.kurtosis_fallback,
    }
}
