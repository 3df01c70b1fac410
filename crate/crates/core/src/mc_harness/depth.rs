use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real-valued curves on a common grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveBundle {
    pub name: String,
    pub grid: Vec<f64>,
    pub curves: Vec<Vec<f64>>,
}

impl CurveBundle {
    pub fn new(name: impl Into<String>, grid: Vec<f64>, curves: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(i) = curves.iter().position(|c| c.len() != grid.len()) {
            return Err(Error::Contract(format!(
                "curve {i} has {} points, grid has {}",
                curves[i].len(),
                grid.len()
            )));
        }
        Ok(Self {
            name: name.into(),
            grid,
            curves,
        })
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// Pointwise mean over curves.
    pub fn mean_curve(&self) -> Vec<f64> {
        let n = self.curves.len() as f64;
        (0..self.grid.len())
            .map(|j| self.curves.iter().map(|c| c[j]).sum::<f64>() / n)
            .collect()
    }

    fn require_depth_input(&self) -> Result<()> {
        if self.curves.len() < 3 {
            return Err(Error::Config(format!(
                "band depth needs at least 3 curves, got {}",
                self.curves.len()
            )));
        }
        if self.grid.is_empty() {
            return Err(Error::Config("band depth needs a non-empty grid".into()));
        }
        Ok(())
    }
}

fn pairs(m: usize) -> f64 {
    (m * m.saturating_sub(1) / 2) as f64
}

/// Modified band depth with bands from curve pairs.
///
/// At each grid point a curve with `L` values strictly below and `U` strictly
/// above lies inside all but `C(L,2) + C(U,2)` of the `C(n,2)` pair bands.
pub fn modified_band_depth(bundle: &CurveBundle) -> Result<Vec<f64>> {
    bundle.require_depth_input()?;
    let n = bundle.curves.len();
    let total = pairs(n);
    let mut depth = vec![0.0; n];
    let mut col: Vec<f64> = Vec::with_capacity(n);
    for j in 0..bundle.grid.len() {
        col.clear();
        col.extend(bundle.curves.iter().map(|c| c[j]));
        let mut sorted = col.clone();
        sorted.sort_by(f64::total_cmp);
        for (i, &x) in col.iter().enumerate() {
            let below = sorted.partition_point(|v| *v < x);
            let above = n - sorted.partition_point(|v| *v <= x);
            depth[i] += (total - pairs(below) - pairs(above)) / total;
        }
    }
    let m = bundle.grid.len() as f64;
    depth.iter_mut().for_each(|d| *d /= m);
    Ok(depth)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSummary {
    pub depths: Vec<f64>,
    pub median_index: usize,
    pub median: Vec<f64>,
    pub mean: Vec<f64>,
    pub central_lower: Vec<f64>,
    pub central_upper: Vec<f64>,
    pub envelope_lower: Vec<f64>,
    pub envelope_upper: Vec<f64>,
    pub outliers: Vec<usize>,
}

/// Functional boxplot: deepest curve as median, envelope of the deepest half
/// as central region, and fences at 1.5 times the central height beyond it.
pub fn functional_summary(bundle: &CurveBundle) -> Result<FunctionalSummary> {
    let depths = modified_band_depth(bundle)?;
    let n = bundle.curves.len();
    let m = bundle.grid.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| depths[b].total_cmp(&depths[a]).then(a.cmp(&b)));
    let median_index = order[0];

    let envelope = |members: &mut dyn Iterator<Item = usize>| {
        let (mut lo, mut hi) = (vec![f64::INFINITY; m], vec![f64::NEG_INFINITY; m]);
        for i in members {
            for j in 0..m {
                lo[j] = lo[j].min(bundle.curves[i][j]);
                hi[j] = hi[j].max(bundle.curves[i][j]);
            }
        }
        (lo, hi)
    };
    let (central_lower, central_upper) = envelope(&mut order.iter().copied().take(n.div_ceil(2)));
    let (fence_lo, fence_hi): (Vec<f64>, Vec<f64>) = (0..m)
        .map(|j| {
            let h = central_upper[j] - central_lower[j];
            (central_lower[j] - 1.5 * h, central_upper[j] + 1.5 * h)
        })
        .unzip();
    let outliers: Vec<usize> = (0..n)
        .filter(|&i| (0..m).any(|j| bundle.curves[i][j] < fence_lo[j] || bundle.curves[i][j] > fence_hi[j]))
        .collect();
    let (envelope_lower, envelope_upper) = envelope(&mut (0..n).filter(|i| !outliers.contains(i)));

    Ok(FunctionalSummary {
        median: bundle.curves[median_index].clone(),
        mean: bundle.mean_curve(),
        depths,
        median_index,
        central_lower,
        central_upper,
        envelope_lower,
        envelope_upper,
        outliers,
    })
}
