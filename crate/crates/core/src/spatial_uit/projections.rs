use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How random projection directions are drawn.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionMethod {
    /// Normalized independent standard normals, uniform on the unit sphere.
    #[default]
    Sphere,
    /// `(cos θ₁, …, cos θ_p)` with `θ_j ~ U[0, 2π]`, rescaled to unit norm.
    CosineAngles,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSet {
    pub p: usize,
    pub directions: Vec<Vec<f64>>,
    pub seed: u64,
    pub method: ProjectionMethod,
}

impl ProjectionSet {
    pub fn k(&self) -> usize {
        self.directions.len()
    }
}

pub fn sample_projections(p: usize, k: usize, seed: u64, method: ProjectionMethod) -> Result<ProjectionSet> {
    if p == 0 || k == 0 {
        return Err(Error::Contract(format!("need p >= 1 and K >= 1, got p={p}, K={k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angle = Uniform::new(0.0, std::f64::consts::TAU).expect("valid range");
    let mut directions = Vec::with_capacity(k);
    let mut v = vec![0.0; p];
    while directions.len() < k {
        for x in v.iter_mut() {
            *x = match method {
                ProjectionMethod::Sphere => rng.sample::<f64, _>(StandardNormal),
                ProjectionMethod::CosineAngles => rng.sample(angle).cos(),
            };
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-150 {
            continue;
        }
        directions.push(v.iter().map(|x| x / norm).collect());
    }
    Ok(ProjectionSet {
        p,
        directions,
        seed,
        method,
    })
}
