use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use spnorm::iid_tests::{doornik_hansen, mardia_tests, TestOutcome};
use spnorm::io::{
    load_field_csv, open_input, read_bundle_csv, write_bundle_csv, write_curves_csv, write_depth_csv, write_field_csv,
    write_summary_csv,
};
use spnorm::mc_harness::{
    functional_summary, run_moment_drift_experiment, run_power_experiment, run_size_experiment, CurveBundle,
    MomentDriftConfig, RejectionCurve, SizeExperimentConfig, TestKind,
};
use spnorm::random_fields::{
    build_cross_covariance, sample_field, sas_inverse_transform, simulate_moving_average, LatticeField, LatticeSpec,
};
use spnorm::spatial_uit::{uit_test, KernelSpec, UitDiagnostics, UitReport};
use spnorm::{Error, Result};

use crate::config::{self, Bandwidth, SimulateConfig, TestConfig};
use crate::output::{OutDir, ResultDocument};

/// Flag overrides shared by the testing commands.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub projections: Option<usize>,
    pub bandwidth: Option<Bandwidth>,
    pub tests: Option<Vec<TestKind>>,
}

impl Overrides {
    fn apply_size(&self, cfg: &mut SizeExperimentConfig) {
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(k) = self.projections {
            cfg.projections = k;
        }
        if let Some(b) = self.bandwidth {
            cfg.bandwidth = b.as_option();
        }
        if let Some(t) = &self.tests {
            cfg.tests = t.clone();
        }
    }
}

pub fn simulate(config: &Path, seed: Option<u64>, out: &Path) -> Result<()> {
    let mut cfg: SimulateConfig = config::load(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    let lattice = LatticeSpec::unit_square(cfg.grid_side)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut field = if let Some(ma) = cfg.model.moving_average()? {
        simulate_moving_average(&ma, &lattice, &mut rng)?
    } else {
        let model = cfg.model.matern()?.expect("model is either moving average or Matérn");
        let cov = build_cross_covariance(&model, &lattice)?;
        let noise: Vec<f64> = (0..2 * lattice.n_sites())
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        sample_field(&cov, &noise, &lattice, 2)?
    };
    if let Some(sas) = &cfg.sas {
        field = sas_inverse_transform(field, sas)?;
    }

    let dir = OutDir::create(out)?;
    dir.write_with("field.csv", |buf| write_field_csv(buf, &field))?;
    dir.write_toml("simulate.config.toml", &cfg)?;
    let results = serde_json::json!({ "field": "field.csv", "n_x": lattice.n_x, "n_y": lattice.n_y, "p": field.p() });
    dir.write_json(
        "simulate.json",
        &ResultDocument::new("simulate", cfg.seed, &cfg, results, serde_json::json!({})),
    )?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct TestResults {
    n_x: usize,
    n_y: usize,
    p: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    uit: Option<UitReport>,
    baselines: Vec<TestOutcome>,
    decisions: Vec<Decision>,
}

#[derive(Debug, Serialize)]
struct Decision {
    test: TestKind,
    reject: bool,
}

pub fn test(config: Option<&Path>, data: Option<&Path>, ov: &Overrides, out: &Path) -> Result<()> {
    let mut cfg: TestConfig = config::load_or_default(config)?;
    if let Some(d) = data {
        cfg.data = Some(d.to_path_buf());
    }
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    if let Some(a) = ov.alpha {
        cfg.alpha = a;
    }
    if let Some(k) = ov.projections {
        cfg.projections = k;
    }
    if let Some(b) = ov.bandwidth {
        cfg.bandwidth = b.as_option();
    }
    if let Some(t) = &ov.tests {
        cfg.tests = t.clone();
    }
    cfg.validate()?;
    let path: PathBuf = cfg
        .data
        .clone()
        .ok_or_else(|| Error::Config("no field given; use --data".into()))?;
    let field = load_field_csv(&path)?;
    let results = evaluate(&field, &cfg)?;
    let diagnostics = results.uit.as_ref().map(|u| u.diagnostics.clone()).unwrap_or_default();

    let dir = OutDir::create(out)?;
    dir.write_toml("test.config.toml", &cfg)?;
    dir.write_json(
        "test.json",
        &ResultDocument::new("test", cfg.seed, &cfg, results, diagnostics),
    )?;
    Ok(())
}

fn evaluate(field: &LatticeField, cfg: &TestConfig) -> Result<TestResults> {
    let spec = *field.spec();
    let kernel = match cfg.bandwidth {
        Some(b) => KernelSpec::bartlett(b, b)?,
        None => KernelSpec::default_for(&spec),
    };
    let mut uit = None;
    let mut baselines = Vec::new();
    let mut decisions = Vec::new();
    let sample = field.to_sample()?;
    let mut mardia = None;
    for &t in &cfg.tests {
        let reject = match t {
            TestKind::Uit => {
                let r = uit_test(
                    field,
                    cfg.projections,
                    cfg.alpha,
                    Some(kernel),
                    cfg.seed,
                    cfg.projection_method,
                )?;
                let reject = r.reject_h0;
                uit = Some(r);
                reject
            }
            TestKind::Ms | TestKind::Mk => {
                let (ms, mk) = match &mardia {
                    Some(m) => m,
                    None => mardia.insert(mardia_tests(&sample, cfg.alpha)?),
                };
                let o = if t == TestKind::Ms { ms.clone() } else { mk.clone() };
                let reject = o.reject;
                baselines.push(o);
                reject
            }
            TestKind::Dh => {
                let o = doornik_hansen(&sample, cfg.alpha)?;
                let reject = o.reject;
                baselines.push(o);
                reject
            }
        };
        decisions.push(Decision { test: t, reject });
    }
    Ok(TestResults {
        n_x: spec.n_x,
        n_y: spec.n_y,
        p: field.p(),
        uit,
        baselines,
        decisions,
    })
}

fn write_curves(dir: &OutDir, stem: &str, curves: &[RejectionCurve]) -> Result<()> {
    dir.write_with(&format!("{stem}.csv"), |buf| write_curves_csv(buf, curves))?;
    Ok(())
}

pub fn size(config: Option<&Path>, ov: &Overrides, out: &Path) -> Result<()> {
    let mut cfg: SizeExperimentConfig = config::load_or_default(config)?;
    ov.apply_size(&mut cfg);
    cfg.validate()?;
    let curves = run_size_experiment(&cfg)?;
    let dir = OutDir::create(out)?;
    write_curves(&dir, "size", &curves)?;
    dir.write_toml("size.config.toml", &cfg)?;
    dir.write_json(
        "size.json",
        &ResultDocument::new("size", cfg.master_seed, &cfg, &curves, UitDiagnostics::default()),
    )?;
    Ok(())
}

pub fn power(config: Option<&Path>, ov: &Overrides, out: &Path) -> Result<()> {
    let mut cfg = config::load_power(config)?;
    ov.apply_size(&mut cfg.base);
    cfg.validate()?;
    let curves = run_power_experiment(&cfg)?;
    let dir = OutDir::create(out)?;
    write_curves(&dir, "power", &curves)?;
    dir.write_toml("power.config.toml", &cfg)?;
    dir.write_json(
        "power.json",
        &ResultDocument::new("power", cfg.base.master_seed, &cfg, &curves, UitDiagnostics::default()),
    )?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct BundleSummary {
    name: String,
    median_index: usize,
    outliers: Vec<usize>,
    mean: Vec<f64>,
}

fn summarize_bundle(dir: &OutDir, stem: &str, bundle: &CurveBundle) -> Result<BundleSummary> {
    let s = functional_summary(bundle)?;
    dir.write_with(&format!("{stem}_summary.csv"), |buf| write_summary_csv(buf, bundle, &s))?;
    dir.write_with(&format!("{stem}_depth.csv"), |buf| write_depth_csv(buf, &s))?;
    Ok(BundleSummary {
        name: bundle.name.clone(),
        median_index: s.median_index,
        outliers: s.outliers,
        mean: s.mean,
    })
}

/// Summarizes a bundle CSV given by `data`, or runs the moment-drift
/// experiment described by `config` and summarizes both Mardia bundles.
pub fn summarize(config: Option<&Path>, data: Option<&Path>, seed: Option<u64>, out: &Path) -> Result<()> {
    let dir = OutDir::create(out)?;
    if let Some(path) = data {
        if config.is_some() {
            return Err(Error::Config(
                "summarize takes either --data or --config, not both".into(),
            ));
        }
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("bundle")
            .to_string();
        let bundle = read_bundle_csv(open_input(path)?, &name)?;
        let summary = summarize_bundle(&dir, "bundle", &bundle)?;
        let echo = serde_json::json!({ "data": path });
        dir.write_json(
            "summarize.json",
            &ResultDocument::new("summarize", 0, echo, [summary], serde_json::json!({})),
        )?;
        return Ok(());
    }
    let mut cfg: MomentDriftConfig = config::load_or_default(config)?;
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    cfg.validate()?;
    let drift = run_moment_drift_experiment(&cfg)?;
    let mut summaries = Vec::new();
    for (stem, bundle) in [("b1", &drift.skewness), ("b2", &drift.kurtosis)] {
        dir.write_with(&format!("{stem}_bundle.csv"), |buf| write_bundle_csv(buf, bundle))?;
        summaries.push(summarize_bundle(&dir, stem, bundle)?);
    }
    dir.write_toml("summarize.config.toml", &cfg)?;
    dir.write_json(
        "summarize.json",
        &ResultDocument::new("summarize", cfg.master_seed, &cfg, summaries, serde_json::json!({})),
    )?;
    Ok(())
}
