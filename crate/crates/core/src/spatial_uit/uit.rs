use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::random_fields::LatticeField;

use super::bh::{bh_procedure, BhResult};
use super::jb_star::{jb_star, JbStarOutcome};
use super::projections::{sample_projections, ProjectionMethod, ProjectionSet};
use super::series::GriddedSeries;
use super::variance::KernelSpec;

/// Union-intersection decision over `K` projected JB* tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UitReport {
    pub projections: ProjectionSet,
    pub kernel: KernelSpec,
    pub alpha: f64,
    /// One entry per direction; `None` where the projected series was constant.
    pub outcomes: Vec<Option<JbStarOutcome>>,
    /// BH over the non-degenerate projections, with `rejected` given as
    /// projection indices.
    pub bh: BhResult,
    pub reject_h0: bool,
    pub diagnostics: UitDiagnostics,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UitDiagnostics {
    pub degenerate_projections: Vec<usize>,
    pub skewness_fallbacks: usize,
    pub kurtosis_fallbacks: usize,
}

pub fn uit_test(
    field: &LatticeField,
    k: usize,
    alpha: f64,
    kernel: Option<KernelSpec>,
    seed: u64,
    method: ProjectionMethod,
) -> Result<UitReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Contract(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let kernel = kernel.unwrap_or_else(|| KernelSpec::default_for(field.spec()));
    kernel.validate()?;
    let projections = sample_projections(field.p(), k, seed, method)?;

    let mut outcomes = Vec::with_capacity(k);
    let mut diagnostics = UitDiagnostics::default();
    let mut tested = Vec::with_capacity(k);
    let mut p_values = Vec::with_capacity(k);
    for (i, a) in projections.directions.iter().enumerate() {
        let series = GriddedSeries::new(*field.spec(), field.project(a)?)?;
        match jb_star(&series, &kernel, alpha) {
            Ok(out) => {
                diagnostics.skewness_fallbacks += out.skewness_fallback as usize;
                diagnostics.kurtosis_fallbacks += out.kurtosis_fallback as usize;
                tested.push(i);
                p_values.push(out.p_value);
                outcomes.push(Some(out));
            }
            Err(Error::Degenerate(_)) => {
                diagnostics.degenerate_projections.push(i);
                outcomes.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    if tested.is_empty() {
        return Err(Error::Degenerate(format!(
            "all {k} projected series have zero variance"
        )));
    }

    let mut bh = bh_procedure(&p_values, alpha)?;
    bh.rejected = bh.rejected.iter().map(|&j| tested[j]).collect();
    let reject_h0 = !bh.rejected.is_empty();
    Ok(UitReport {
        projections,
        kernel,
        alpha,
        outcomes,
        bh,
        reject_h0,
        diagnostics,
    })
}
