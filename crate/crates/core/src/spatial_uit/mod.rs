//! Spatially adjusted Jarque–Bera tests on random projections, combined by a
//! union-intersection rule with Benjamini–Hochberg control.

mod bh;
mod jb_star;
mod projections;
mod series;
mod uit;
mod variance;

pub use bh::{bh_procedure, BhResult};
pub use jb_star::{jb_star, JbStarOutcome};
pub use projections::{sample_projections, ProjectionMethod, ProjectionSet};
pub use series::{sample_autocov, standardize, GriddedSeries};
pub use uit::{uit_test, UitDiagnostics, UitReport};
pub use variance::{default_bandwidth, variance_estimators, KernelKind, KernelSpec, VarianceEstimates};
