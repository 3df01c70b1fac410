//! Monte Carlo size, power and moment-drift experiments, and functional
//! boxplot summaries of curve bundles.

mod depth;
mod experiments;

pub use depth::{functional_summary, modified_band_depth, CurveBundle, FunctionalSummary};
pub use experiments::{
    default_h_star_grid, replicate_rng, run_moment_drift_experiment, run_power_experiment, run_size_experiment,
    worker_count, MomentDriftConfig, MomentDriftResult, PowerExperimentConfig, RejectionCurve, SizeExperimentConfig,
    TestKind, WORKERS_ENV,
};
