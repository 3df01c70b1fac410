use crate::error::{Error, Result};
use crate::iid_tests::central_moments;
use crate::random_fields::LatticeSpec;

/// One real variable observed on every lattice site.
#[derive(Debug, Clone, PartialEq)]
pub struct GriddedSeries {
    spec: LatticeSpec,
    values: Vec<f64>,
}

impl GriddedSeries {
    pub fn new(spec: LatticeSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.n_sites() {
            return Err(Error::Contract(format!(
                "series on a {}x{} grid needs {} values, got {}",
                spec.n_x,
                spec.n_y,
                spec.n_sites(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Contract("series values must be finite".into()));
        }
        Ok(Self { spec, values })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.spec.n_x + ix]
    }
}

/// Centres to mean 0 and scales to divisor-`n` variance 1.
pub fn standardize(series: &GriddedSeries) -> Result<GriddedSeries> {
    let (m2, _, _) = central_moments(&series.values);
    let scale = series.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if !(m2 > 1e-24 * scale * scale) || m2 == 0.0 {
        return Err(Error::Degenerate("series has zero variance".into()));
    }
    let n = series.len() as f64;
    let mean = series.values.iter().sum::<f64>() / n;
    let sd = m2.sqrt();
    let values = series.values.iter().map(|v| (v - mean) / sd).collect();
    GriddedSeries::new(series.spec, values)
}

/// `Ĉ(h) = (1/n) Σ z(s) z(s+h)` over site pairs inside the grid, with `n`
/// the total number of sites. Lags with no valid pairs give 0.
pub fn sample_autocov(series: &GriddedSeries, lag: (isize, isize)) -> f64 {
    let (nx, ny) = (series.spec.n_x as isize, series.spec.n_y as isize);
    let (hx, hy) = lag;
    if hx.abs() >= nx || hy.abs() >= ny {
        return 0.0;
    }
    let x_range = 0.max(-hx)..nx.min(nx - hx);
    let y_range = 0.max(-hy)..ny.min(ny - hy);
    let mut acc = 0.0;
    for iy in y_range {
        for ix in x_range.clone() {
            acc += series.at(ix as usize, iy as usize) * series.at((ix + hx) as usize, (iy + hy) as usize);
        }
    }
    acc / series.len() as f64
}
