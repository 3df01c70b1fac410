use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::lattice::LatticeField;

/// Sinh-arcsinh parameters: `epsilon` shifts skewness, `delta` sets tail weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SasParams {
    pub epsilon: f64,
    pub delta: f64,
}

impl SasParams {
    pub const IDENTITY: Self = Self {
        epsilon: 0.0,
        delta: 1.0,
    };

    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        let p = Self { epsilon, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) || !self.delta.is_finite() || !self.epsilon.is_finite() {
            return Err(Error::Domain(format!(
                "sinh-arcsinh needs finite epsilon and delta > 0, got ({}, {})",
                self.epsilon, self.delta
            )));
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// `sinh((asinh(z) + ε) / δ)`.
    #[inline]
    pub fn apply(&self, z: f64) -> f64 {
        if self.is_identity() {
            z
        } else {
            ((z.asinh() + self.epsilon) / self.delta).sinh()
        }
    }
}

/// Element-wise inverse sinh-arcsinh transform, one parameter pair per variable.
pub fn sas_inverse_transform(field: LatticeField, params: &[SasParams]) -> Result<LatticeField> {
    if params.len() != field.p() {
        return Err(Error::Contract(format!(
            "need one SAS parameter pair per variable ({}), got {}",
            field.p(),
            params.len()
        )));
    }
    for p in params {
        p.validate()?;
    }
    Ok(field.map_values(|l, v| params[l].apply(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random_fields::LatticeSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn identity_and_point_value() {
        let spec = LatticeSpec::new(2, 2, 1.0).unwrap();
        let f = LatticeField::new(spec, 1, vec![-1.3, 0.0, 0.7, 12.0]).unwrap();
        let g = sas_inverse_transform(f.clone(), &[SasParams::IDENTITY]).unwrap();
        assert_eq!(f, g);
        let h = sas_inverse_transform(f, &[SasParams::new(0.5, 0.5).unwrap()]).unwrap();
        assert!((h.get(0, 1) - 1.0f64.sinh()).abs() < 1e-15);
        assert!((h.get(0, 1) - 1.175_201_2).abs() < 1e-7);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(SasParams::new(0.1, 0.0).is_err());
        assert!(SasParams::new(0.1, -1.0).is_err());
        let spec = LatticeSpec::new(2, 2, 1.0).unwrap();
        let f = LatticeField::new(spec, 1, vec![0.0; 4]).unwrap();
        assert!(sas_inverse_transform(f.clone(), &[]).is_err());
        let bad = SasParams {
            epsilon: 0.0,
            delta: 0.0,
        };
        assert!(sas_inverse_transform(f, &[bad]).is_err());
    }

    #[test]
    fn alternative_parameters_are_skewed_and_heavy_tailed() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for params in [SasParams::new(0.5, 0.5).unwrap(), SasParams::new(0.3, 0.5).unwrap()] {
            let xs: Vec<f64> = (0..200_000)
                .map(|_| params.apply(StandardNormal.sample(&mut rng)))
                .collect();
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let m = |k: i32| xs.iter().map(|x| (x - mean).powi(k)).sum::<f64>() / n;
            let skew = m(3) / m(2).powf(1.5);
            let excess = m(4) / (m(2) * m(2)) - 3.0;
            assert!(skew > 0.0 && excess > 0.0, "{params:?}: skew {skew}, excess {excess}");
        }
    }
}
