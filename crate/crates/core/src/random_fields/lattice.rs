use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iid_tests::Sample;

/// A regular `n_x × n_y` grid of sites with equal spacing along both axes.
///
/// Sites are indexed `site = iy * n_x + ix` with zero-based `ix`, `iy`; the
/// site `(ix, iy)` sits at coordinates `(ix * spacing, iy * spacing)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub n_x: usize,
    pub n_y: usize,
    pub spacing: f64,
}

impl LatticeSpec {
    pub fn new(n_x: usize, n_y: usize, spacing: f64) -> Result<Self> {
        if n_x < 2 || n_y < 2 {
            return Err(Error::Contract(format!(
                "lattice must be at least 2x2, got {n_x}x{n_y}"
            )));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::Contract(format!(
                "lattice spacing must be positive, got {spacing}"
            )));
        }
        Ok(Self { n_x, n_y, spacing })
    }

    /// `n × n` grid covering the unit square, spacing `1/(n-1)`.
    pub fn unit_square(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Contract(format!("lattice side must be at least 2, got {n}")));
        }
        Self::new(n, n, 1.0 / (n - 1) as f64)
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.n_x * self.n_y
    }

    #[inline]
    pub fn site(&self, ix: usize, iy: usize) -> usize {
        iy * self.n_x + ix
    }

    #[inline]
    pub fn coords(&self, site: usize) -> (f64, f64) {
        let ix = site % self.n_x;
        let iy = site / self.n_x;
        (ix as f64 * self.spacing, iy as f64 * self.spacing)
    }

    pub fn all_coords(&self) -> Vec<(f64, f64)> {
        (0..self.n_sites()).map(|s| self.coords(s)).collect()
    }
}

/// `p` real variables observed at every site of a lattice.
///
/// Values are stored variable-major: variable `l` at `site` lives at
/// `values[l * n_sites + site]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeField {
    spec: LatticeSpec,
    p: usize,
    values: Vec<f64>,
}

impl LatticeField {
    pub fn new(spec: LatticeSpec, p: usize, values: Vec<f64>) -> Result<Self> {
        if p == 0 {
            return Err(Error::Contract("field needs at least one variable".into()));
        }
        if values.len() != p * spec.n_sites() {
            return Err(Error::Contract(format!(
                "field with p={p} on {}x{} grid needs {} values, got {}",
                spec.n_x,
                spec.n_y,
                p * spec.n_sites(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Contract("field values must be finite".into()));
        }
        Ok(Self { spec, p, values })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn variable(&self, l: usize) -> &[f64] {
        let n = self.spec.n_sites();
        &self.values[l * n..(l + 1) * n]
    }

    pub fn get(&self, l: usize, site: usize) -> f64 {
        self.values[l * self.spec.n_sites() + site]
    }

    /// Projection `Σ_l a_l X_l(s)` at every site.
    pub fn project(&self, direction: &[f64]) -> Result<Vec<f64>> {
        if direction.len() != self.p {
            return Err(Error::Contract(format!(
                "direction has dimension {}, field has p={}",
                direction.len(),
                self.p
            )));
        }
        let n = self.spec.n_sites();
        let mut out = vec![0.0; n];
        for (l, &a) in direction.iter().enumerate() {
            for (o, &v) in out.iter_mut().zip(self.variable(l)) {
                *o += a * v;
            }
        }
        Ok(out)
    }

    /// Sites as observations: an `n_sites × p` sample ignoring spatial layout.
    pub fn to_sample(&self) -> Result<Sample> {
        let n = self.spec.n_sites();
        let mut rows = Vec::with_capacity(n * self.p);
        for s in 0..n {
            for l in 0..self.p {
                rows.push(self.get(l, s));
            }
        }
        Sample::new(n, self.p, rows)
    }

    pub(crate) fn map_values(mut self, f: impl Fn(usize, f64) -> f64) -> Self {
        let n = self.spec.n_sites();
        for (i, v) in self.values.iter_mut().enumerate() {
            *v = f(i / n, *v);
        }
        self
    }
}
