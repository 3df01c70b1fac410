//! Gaussian and non-Gaussian random fields on regular lattices.

mod convolution;
mod lattice;
mod matern;
mod sas;

pub use convolution::{
    convolve, kernel_convolution_from_innovations, moving_average_from_innovations, simulate_kernel_convolution,
    simulate_moving_average, GaussianFieldSampler, InnovationCorrelation, KernelConvolutionSpec, LatticeKernel,
    MovingAverageSimulator, MovingAverageSpec, PaddedGrid,
};
pub use lattice::{LatticeField, LatticeSpec};
pub use matern::{
    build_cross_covariance, cross_covariance_at_sites, matern_corr, rho_bound, sample_field, sample_field_with_root,
    solve_effective_range, BivariateMaternModel, CorrelationFamily, MaternParams, EFFECTIVE_RANGE_LEVEL,
};
pub use sas::{sas_inverse_transform, SasParams};
