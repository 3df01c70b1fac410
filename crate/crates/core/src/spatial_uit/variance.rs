//! Kernel estimators of the long-run variances of the sample skewness and
//! kurtosis under spatial dependence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::random_fields::LatticeSpec;

use super::series::{sample_autocov, GriddedSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// `k(t) = (1 − |t|)·1{|t| ≤ 1}`.
    Bartlett,
}

impl KernelKind {
    #[inline]
    pub fn weight(self, t: f64) -> f64 {
        match self {
            Self::Bartlett => {
                let a = t.abs();
                if a <= 1.0 {
                    1.0 - a
                } else {
                    0.0
                }
            }
        }
    }
}

/// Lag kernel and per-axis bandwidths `(b_x, b_y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kernel: KernelKind,
    pub bandwidths: [usize; 2],
}

impl KernelSpec {
    pub fn bartlett(b_x: usize, b_y: usize) -> Result<Self> {
        let k = Self {
            kernel: KernelKind::Bartlett,
            bandwidths: [b_x, b_y],
        };
        k.validate()?;
        Ok(k)
    }

    /// Bartlett kernel with [`default_bandwidth`] along each axis.
    pub fn default_for(lattice: &LatticeSpec) -> Self {
        Self {
            kernel: KernelKind::Bartlett,
            bandwidths: [default_bandwidth(lattice.n_x), default_bandwidth(lattice.n_y)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bandwidths.contains(&0) {
            return Err(Error::Contract("bandwidths must be at least 1".into()));
        }
        Ok(())
    }

    /// Product weight `Π_l k(h_l / b_l)` for lag `h`.
    #[inline]
    pub fn weight(&self, lag: (isize, isize)) -> f64 {
        self.kernel.weight(lag.0 as f64 / self.bandwidths[0] as f64)
            * self.kernel.weight(lag.1 as f64 / self.bandwidths[1] as f64)
    }
}

/// `⌊4 (N/100)^{2/9}⌋`, at least 1.
pub fn default_bandwidth(n: usize) -> usize {
    ((4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize).max(1)
}

/// Long-run variance estimates for `S_n` and `K_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceEstimates {
    pub phi_s2: f64,
    pub phi_k2: f64,
    /// The skewness estimate was not positive and was replaced by its lag-0 value 6.
    pub skewness_fallback: bool,
    /// The kurtosis estimate was not positive and was replaced by its lag-0 value 24.
    pub kurtosis_fallback: bool,
}

/// `φ̂_S² = 6 Σ_h w(h) Ĉ³(h)` and `φ̂_K² = 24 Σ_h w(h) Ĉ⁴(h)` over the full
/// signed lag box `|h_l| ≤ b_l`, for an already standardized series.
pub fn variance_estimators(series: &GriddedSeries, kernel: &KernelSpec) -> Result<VarianceEstimates> {
    kernel.validate()?;
    let spec = series.spec();
    let [bx, by] = kernel.bandwidths;
    if bx >= spec.n_x || by >= spec.n_y {
        return Err(Error::Contract(format!(
            "bandwidths ({bx}, {by}) must be smaller than the {}x{} grid",
            spec.n_x, spec.n_y
        )));
    }
    let (bx, by) = (bx as isize, by as isize);
    let (mut sum3, mut sum4) = (0.0, 0.0);
    for hy in -by..=by {
        for hx in -bx..=bx {
            let w = kernel.weight((hx, hy));
            if w == 0.0 {
                continue;
            }
            let c = sample_autocov(series, (hx, hy));
            let c2 = c * c;
            sum3 += w * c2 * c;
            sum4 += w * c2 * c2;
        }
    }
    let (mut phi_s2, mut phi_k2) = (6.0 * sum3, 24.0 * sum4);
    let skewness_fallback = !(phi_s2 > 0.0);
    let kurtosis_fallback = !(phi_k2 > 0.0);
    if skewness_fallback {
        phi_s2 = 6.0;
    }
    if kurtosis_fallback {
        phi_k2 = 24.0;
    }
    Ok(VarianceEstimates {
        phi_s2,
        phi_k2,
        skewness_fallback,
        kurtosis_fallback,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spatial_uit::standardize;

    #[test]
    fn bandwidth_rule() {
        assert_eq!(default_bandwidth(15), 2);
        assert_eq!(default_bandwidth(30), 3);
        assert_eq!(default_bandwidth(100), 4);
        assert_eq!(default_bandwidth(2), 1);
    }

    #[test]
    fn bartlett_weights() {
        let k = KernelSpec::bartlett(2, 2).unwrap();
        assert_eq!(k.weight((0, 0)), 1.0);
        assert_eq!(k.weight((1, 0)), 0.5);
        assert_eq!(k.weight((-1, 1)), 0.25);
        assert_eq!(k.weight((2, 0)), 0.0);
        assert!(KernelSpec::bartlett(0, 1).is_err());
    }

    #[test]
    fn lag_one_contribution() {
        // Rows alternate so that Ĉ vanishes except along x; compare the
        // estimator against the lag-0 value plus the two x-lags.
        let spec = LatticeSpec::new(6, 6, 1.0).unwrap();
        let vals: Vec<f64> = (0..36).map(|i| ((i * 13 + 5) % 7) as f64).collect();
        let z = standardize(&GriddedSeries::new(spec, vals).unwrap()).unwrap();
        let k = KernelSpec::bartlett(2, 2).unwrap();
        let est = variance_estimators(&z, &k).unwrap();
        let mut want = 0.0;
        for hy in -1..=1isize {
            for hx in -1..=1isize {
                want += k.weight((hx, hy)) * sample_autocov(&z, (hx, hy)).powi(3);
            }
        }
        if want > 0.0 {
            assert!((est.phi_s2 - 6.0 * want).abs() < 1e-12);
        } else {
            assert!(est.skewness_fallback && est.phi_s2 == 6.0);
        }
        // Ĉ(±(1,0)) = c contributes 6·2·k(1/2)·k(0)·c³ = 6c³.
        let c = sample_autocov(&z, (1, 0));
        let pair = 6.0 * (k.weight((1, 0)) + k.weight((-1, 0))) * c.powi(3);
        assert!((pair - 6.0 * c.powi(3)).abs() < 1e-15);
    }

    #[test]
    fn bandwidth_one_is_iid() {
        let spec = LatticeSpec::new(4, 5, 1.0).unwrap();
        let vals: Vec<f64> = (0..20).map(|i| (i as f64 * 1.7).sin()).collect();
        let z = standardize(&GriddedSeries::new(spec, vals).unwrap()).unwrap();
        let est = variance_estimators(&z, &KernelSpec::bartlett(1, 1).unwrap()).unwrap();
        assert!((est.phi_s2 - 6.0).abs() < 1e-13 && (est.phi_k2 - 24.0).abs() < 1e-12);
    }

    #[test]
    fn oversized_bandwidth_rejected() {
        let spec = LatticeSpec::new(3, 3, 1.0).unwrap();
        let z = GriddedSeries::new(spec, vec![0.0; 9]).unwrap();
        assert!(variance_estimators(&z, &KernelSpec::bartlett(3, 1).unwrap()).is_err());
    }
}
