use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iid_tests::{doornik_hansen, mardia_measures, mardia_tests};
use crate::numerics::sym_sqrt;
use crate::random_fields::{
    build_cross_covariance, sample_field_with_root, solve_effective_range, BivariateMaternModel, CorrelationFamily,
    InnovationCorrelation, LatticeField, LatticeSpec, MovingAverageSimulator, MovingAverageSpec, SasParams,
};
use crate::spatial_uit::{uit_test, KernelSpec, ProjectionMethod};

use super::depth::CurveBundle;

/// Environment variable holding the worker-thread count; unset or 0 uses
/// every available core.
pub const WORKERS_ENV: &str = "SPNORM_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestKind {
    #[serde(rename = "UIT")]
    Uit,
    #[serde(rename = "MS")]
    Ms,
    #[serde(rename = "MK")]
    Mk,
    #[serde(rename = "DH")]
    Dh,
}

impl TestKind {
    pub const ALL: [TestKind; 4] = [Self::Uit, Self::Ms, Self::Mk, Self::Dh];

    pub fn label(self) -> &'static str {
        match self {
            Self::Uit => "UIT",
            Self::Ms => "MS",
            Self::Mk => "MK",
            Self::Dh => "DH",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown test {s:?}, expected one of UIT, MS, MK, DH")))
    }
}

/// `0.1, 0.12, …, 0.9`.
pub fn default_h_star_grid() -> Vec<f64> {
    (0..=40).map(|i| (10 + 2 * i) as f64 / 100.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SizeExperimentConfig {
    /// Grid side length; the lattice is `grid_side × grid_side` on the unit square.
    pub grid_side: usize,
    pub p: usize,
    /// Number of projections for the UIT.
    pub projections: usize,
    pub alpha: f64,
    pub h_star_grid: Vec<f64>,
    pub n_sim: usize,
    pub family: CorrelationFamily,
    pub thetas: Vec<f64>,
    pub tests: Vec<TestKind>,
    pub master_seed: u64,
    pub common_random_numbers: bool,
    /// Bartlett bandwidth along both axes; `None` uses the default rule.
    pub bandwidth: Option<usize>,
    pub projection_method: ProjectionMethod,
}

impl Default for SizeExperimentConfig {
    fn default() -> Self {
        Self {
            grid_side: 15,
            p: 2,
            projections: 100,
            alpha: 0.05,
            h_star_grid: default_h_star_grid(),
            n_sim: 1000,
            family: CorrelationFamily::Exponential,
            thetas: vec![0.2, -0.2],
            tests: TestKind::ALL.to_vec(),
            master_seed: 0,
            common_random_numbers: false,
            bandwidth: None,
            projection_method: ProjectionMethod::Sphere,
        }
    }
}

impl SizeExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.tests.is_empty() {
            return fail("no tests selected".into());
        }
        if self.grid_side < 3 {
            return fail(format!("grid_side must be at least 3, got {}", self.grid_side));
        }
        if self.p == 0 || self.thetas.len() != self.p {
            return fail(format!(
                "need p >= 1 and one theta per variable (p={}, {} thetas)",
                self.p,
                self.thetas.len()
            ));
        }
        if self.grid_side * self.grid_side <= self.p {
            return fail("grid has too few sites for the dimension".into());
        }
        if self.projections == 0 {
            return fail("projections must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.n_sim == 0 {
            return fail("n_sim must be at least 1".into());
        }
        if self.n_sim > u32::MAX as usize || self.h_star_grid.len() > u32::MAX as usize {
            return fail("n_sim and the h* grid must each fit in 32 bits".into());
        }
        if self.h_star_grid.is_empty() {
            return fail("h_star_grid is empty".into());
        }
        if let Some(h) = self.h_star_grid.iter().find(|h| !(**h > 0.0 && **h <= 1.0)) {
            return fail(format!("h* values must lie in (0, 1], got {h}"));
        }
        if let Some(t) = self.thetas.iter().find(|t| !t.is_finite()) {
            return fail(format!("theta {t} is not finite"));
        }
        if let Some(b) = self.bandwidth {
            if b == 0 || b >= self.grid_side {
                return fail(format!("bandwidth must lie in 1..{}, got {b}", self.grid_side));
            }
        }
        Ok(())
    }

    pub fn lattice(&self) -> Result<LatticeSpec> {
        LatticeSpec::unit_square(self.grid_side)
    }

    pub fn kernel(&self, lattice: &LatticeSpec) -> Result<KernelSpec> {
        match self.bandwidth {
            Some(b) => KernelSpec::bartlett(b, b),
            None => Ok(KernelSpec::default_for(lattice)),
        }
    }
}

/// Size settings plus the alternative.
///
/// The flattened layout means serde cannot reject unknown keys here; callers
/// reading untrusted files should check keys themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerExperimentConfig {
    #[serde(flatten)]
    pub base: SizeExperimentConfig,
    /// One sinh-arcsinh pair per variable.
    pub sas_params: Vec<SasParams>,
}

impl Default for PowerExperimentConfig {
    fn default() -> Self {
        Self {
            base: SizeExperimentConfig::default(),
            sas_params: vec![SasParams::new(0.5, 0.5).unwrap(), SasParams::new(0.3, 0.5).unwrap()],
        }
    }
}

impl PowerExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.sas_params.len() != self.base.p {
            return Err(Error::Config(format!(
                "need one SAS pair per variable ({}), got {}",
                self.base.p,
                self.sas_params.len()
            )));
        }
        for s in &self.sas_params {
            s.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }
}

/// Rejection frequency of one test along the h* grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionCurve {
    pub test: TestKind,
    pub h_star: Vec<f64>,
    pub rate: Vec<f64>,
    /// Binomial standard error `√(r(1−r)/n_sim)`.
    pub stderr: Vec<f64>,
    pub n_sim: usize,
}

/// Generator for replicate `rep`; `h_idx` is `None` under common random numbers.
pub fn replicate_rng(master_seed: u64, rep: usize, h_idx: Option<usize>) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    let stream = match h_idx {
        Some(h) => ((h as u64 + 1) << 32) | rep as u64,
        None => rep as u64,
    };
    rng.set_stream(stream);
    rng
}

/// Worker count from [`WORKERS_ENV`]; `None` means all available cores.
pub fn worker_count() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(s) if s.trim().is_empty() => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(n) => Ok(Some(n)),
            Err(_) => Err(Error::Config(format!(
                "{WORKERS_ENV} must be a non-negative integer, got {s:?}"
            ))),
        },
    }
}

fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Runs every enabled test on one field; one decision per entry of `tests`.
fn decisions(
    field: &LatticeField,
    cfg: &SizeExperimentConfig,
    kernel: KernelSpec,
    projection_seed: u64,
) -> Result<Vec<bool>> {
    let needs_mardia = cfg.tests.iter().any(|t| matches!(t, TestKind::Ms | TestKind::Mk));
    let needs_sample = needs_mardia || cfg.tests.contains(&TestKind::Dh);
    let sample = if needs_sample { Some(field.to_sample()?) } else { None };
    let mardia = match (&sample, needs_mardia) {
        (Some(s), true) => Some(mardia_tests(s, cfg.alpha)?),
        _ => None,
    };
    cfg.tests
        .iter()
        .map(|t| {
            Ok(match t {
                TestKind::Uit => {
                    uit_test(
                        field,
                        cfg.projections,
                        cfg.alpha,
                        Some(kernel),
                        projection_seed,
                        cfg.projection_method,
                    )?
                    .reject_h0
                }
                TestKind::Ms => mardia.as_ref().expect("computed above").0.reject,
                TestKind::Mk => mardia.as_ref().expect("computed above").1.reject,
                TestKind::Dh => doornik_hansen(sample.as_ref().expect("computed above"), cfg.alpha)?.reject,
            })
        })
        .collect()
}

fn run_rejection_experiment(cfg: &SizeExperimentConfig, sas: Option<&[SasParams]>) -> Result<Vec<RejectionCurve>> {
    let lattice = cfg.lattice()?;
    let kernel = cfg.kernel(&lattice)?;
    let n_tests = cfg.tests.len();
    let mut counts = vec![vec![0usize; cfg.h_star_grid.len()]; n_tests];

    with_pool(|| -> Result<()> {
        for (h_idx, &h_star) in cfg.h_star_grid.iter().enumerate() {
            let spec = MovingAverageSpec {
                thetas: cfg.thetas.clone(),
                innovation: InnovationCorrelation::from_effective_range(cfg.family, h_star)?,
            };
            let sim = MovingAverageSimulator::new(&spec, &lattice)?;
            let stream_h = (!cfg.common_random_numbers).then_some(h_idx);
            let per_rep: Vec<Vec<bool>> = (0..cfg.n_sim)
                .into_par_iter()
                .map(|rep| {
                    let mut rng = replicate_rng(cfg.master_seed, rep, stream_h);
                    let mut field = sim.simulate(&mut rng);
                    if let Some(params) = sas {
                        field = crate::random_fields::sas_inverse_transform(field, params)?;
                    }
                    let projection_seed: u64 = rng.random();
                    decisions(&field, cfg, kernel, projection_seed)
                })
                .collect::<Result<_>>()?;
            for row in per_rep {
                for (t, hit) in row.into_iter().enumerate() {
                    counts[t][h_idx] += hit as usize;
                }
            }
        }
        Ok(())
    })??;

    let n = cfg.n_sim as f64;
    Ok(cfg
        .tests
        .iter()
        .zip(counts)
        .map(|(&test, c)| {
            let rate: Vec<f64> = c.iter().map(|&k| k as f64 / n).collect();
            let stderr = rate.iter().map(|r| (r * (1.0 - r) / n).sqrt()).collect();
            RejectionCurve {
                test,
                h_star: cfg.h_star_grid.clone(),
                rate,
                stderr,
                n_sim: cfg.n_sim,
            }
        })
        .collect())
}

/// Empirical type I error of each enabled test under the Gaussian
/// moving-average model.
pub fn run_size_experiment(cfg: &SizeExperimentConfig) -> Result<Vec<RejectionCurve>> {
    cfg.validate()?;
    run_rejection_experiment(cfg, None)
}

/// Empirical power against sinh-arcsinh transforms of the same fields.
pub fn run_power_experiment(cfg: &PowerExperimentConfig) -> Result<Vec<RejectionCurve>> {
    cfg.validate()?;
    run_rejection_experiment(&cfg.base, Some(&cfg.sas_params))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MomentDriftConfig {
    pub grid_side: usize,
    pub family: CorrelationFamily,
    pub rho12: f64,
    pub h_star_grid: Vec<f64>,
    pub n_rep: usize,
    pub master_seed: u64,
}

impl Default for MomentDriftConfig {
    fn default() -> Self {
        Self {
            grid_side: 15,
            family: CorrelationFamily::Exponential,
            rho12: 0.5,
            h_star_grid: default_h_star_grid(),
            n_rep: 200,
            master_seed: 0,
        }
    }
}

impl MomentDriftConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_side < 2 {
            return Err(Error::Config(format!(
                "grid_side must be at least 2, got {}",
                self.grid_side
            )));
        }
        if self.n_rep < 2 {
            return Err(Error::Config(format!("n_rep must be at least 2, got {}", self.n_rep)));
        }
        if self.h_star_grid.is_empty() || self.h_star_grid.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(Error::Config(
                "h_star_grid must be a non-empty list of positive values".into(),
            ));
        }
        Ok(())
    }
}

/// Mardia `b₁` and `b₂` curves over h*, with one fixed noise vector per
/// replicate shared across the whole grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentDriftResult {
    pub skewness: CurveBundle,
    pub kurtosis: CurveBundle,
}

pub fn run_moment_drift_experiment(cfg: &MomentDriftConfig) -> Result<MomentDriftResult> {
    cfg.validate()?;
    let lattice = LatticeSpec::unit_square(cfg.grid_side)?;
    let dim = 2 * lattice.n_sites();
    let n_h = cfg.h_star_grid.len();
    let mut b1 = vec![vec![0.0; n_h]; cfg.n_rep];
    let mut b2 = vec![vec![0.0; n_h]; cfg.n_rep];

    with_pool(|| -> Result<()> {
        for (h_idx, &h_star) in cfg.h_star_grid.iter().enumerate() {
            let beta = solve_effective_range(cfg.family, h_star)?;
            let model = BivariateMaternModel::standard(cfg.family.nu(), beta, cfg.rho12)?;
            let root = sym_sqrt(&build_cross_covariance(&model, &lattice)?)?;
            let measures: Vec<(f64, f64)> = (0..cfg.n_rep)
                .into_par_iter()
                .map(|rep| {
                    let mut rng = replicate_rng(cfg.master_seed, rep, None);
                    let noise: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
                    let field = sample_field_with_root(&root, &noise, &lattice, 2)?;
                    mardia_measures(&field.to_sample()?)
                })
                .collect::<Result<_>>()?;
            for (rep, (s, k)) in measures.into_iter().enumerate() {
                b1[rep][h_idx] = s;
                b2[rep][h_idx] = k;
            }
        }
        Ok(())
    })??;

    Ok(MomentDriftResult {
        skewness: CurveBundle::new("mardia_b1", cfg.h_star_grid.clone(), b1)?,
        kurtosis: CurveBundle::new("mardia_b2", cfg.h_star_grid.clone(), b2)?,
    })
}
