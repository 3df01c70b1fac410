//! Run configurations read from TOML (or JSON) files, with flag overrides.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use spnorm::mc_harness::{PowerExperimentConfig, TestKind};
use spnorm::random_fields::{
    solve_effective_range, BivariateMaternModel, CorrelationFamily, InnovationCorrelation, MovingAverageSpec, SasParams,
};
use spnorm::spatial_uit::ProjectionMethod;
use spnorm::{Error, Result};

/// Parses a config file; `.json` files are read as JSON, anything else as TOML.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    } else {
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

fn top_level_keys(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)?;
    let bad = |e: String| Error::Config(format!("{}: {e}", path.display()));
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        let v: serde_json::Map<String, serde_json::Value> =
            serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        Ok(v.keys().cloned().collect())
    } else {
        let t: toml::Table = toml::from_str(&text).map_err(|e| bad(e.to_string()))?;
        Ok(t.keys().cloned().collect())
    }
}

/// Power configs flatten the size settings, so unknown keys are checked here.
pub fn load_power(path: Option<&Path>) -> Result<PowerExperimentConfig> {
    let Some(path) = path else {
        return Ok(PowerExperimentConfig::default());
    };
    let cfg: PowerExperimentConfig = load(path)?;
    let mut probe = PowerExperimentConfig::default();
    probe.base.bandwidth = Some(1);
    let known = serde_json::to_value(&probe).map_err(|e| Error::Config(e.to_string()))?;
    let known = known.as_object().expect("config serializes to a map");
    if let Some(k) = top_level_keys(path)?.into_iter().find(|k| !known.contains_key(k)) {
        return Err(Error::Config(format!("{}: unknown field `{k}`", path.display())));
    }
    Ok(cfg)
}

pub fn load_or_default<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    path.map_or_else(|| Ok(T::default()), load)
}

/// Field model for `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldModel {
    /// Rook-neighbour moving average of a correlated innovation field.
    MovingAverage {
        thetas: Vec<f64>,
        family: CorrelationFamily,
        h_star: f64,
    },
    /// Bivariate Matérn with unit variances and shared range.
    Matern {
        family: CorrelationFamily,
        h_star: f64,
        rho12: f64,
    },
}

impl FieldModel {
    pub fn p(&self) -> usize {
        match self {
            Self::MovingAverage { thetas, .. } => thetas.len(),
            Self::Matern { .. } => 2,
        }
    }

    pub fn moving_average(&self) -> Result<Option<MovingAverageSpec>> {
        match *self {
            Self::MovingAverage {
                ref thetas,
                family,
                h_star,
            } => Ok(Some(MovingAverageSpec {
                thetas: thetas.clone(),
                innovation: InnovationCorrelation::from_effective_range(family, h_star)?,
            })),
            Self::Matern { .. } => Ok(None),
        }
    }

    pub fn matern(&self) -> Result<Option<BivariateMaternModel>> {
        match *self {
            Self::Matern { family, h_star, rho12 } => {
                let beta = solve_effective_range(family, h_star)?;
                Ok(Some(BivariateMaternModel::standard(family.nu(), beta, rho12)?))
            }
            Self::MovingAverage { .. } => Ok(None),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub grid_side: usize,
    #[serde(default)]
    pub seed: u64,
    pub model: FieldModel,
    /// Optional sinh-arcsinh pair per variable applied after simulation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sas: Option<Vec<SasParams>>,
}

impl SimulateConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_side < 2 {
            return Err(Error::Config(format!(
                "grid_side must be at least 2, got {}",
                self.grid_side
            )));
        }
        if self.model.p() == 0 {
            return Err(Error::Config("model needs at least one variable".into()));
        }
        if let Some(s) = &self.sas {
            if s.len() != self.model.p() {
                return Err(Error::Config(format!(
                    "need {} SAS pairs, got {}",
                    self.model.p(),
                    s.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestConfig {
    /// Field CSV; the `--data` flag takes precedence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    pub alpha: f64,
    pub projections: usize,
    /// Bartlett bandwidth along both axes; absent means the default rule.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<usize>,
    pub tests: Vec<TestKind>,
    pub seed: u64,
    pub projection_method: ProjectionMethod,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            data: None,
            alpha: 0.05,
            projections: 100,
            bandwidth: None,
            tests: TestKind::ALL.to_vec(),
            seed: 0,
            projection_method: ProjectionMethod::Sphere,
        }
    }
}

impl TestConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.projections == 0 {
            return Err(Error::Config("projections must be at least 1".into()));
        }
        if self.tests.is_empty() {
            return Err(Error::Config("no tests selected".into()));
        }
        if self.bandwidth == Some(0) {
            return Err(Error::Config("bandwidth must be at least 1".into()));
        }
        Ok(())
    }
}

/// `--bandwidth` value: a positive integer or `auto`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bandwidth {
    Auto,
    Fixed(usize),
}

impl Bandwidth {
    pub fn as_option(self) -> Option<usize> {
        match self {
            Self::Auto => None,
            Self::Fixed(b) => Some(b),
        }
    }
}

impl std::str::FromStr for Bandwidth {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Self::Auto);
        }
        match s.parse::<usize>() {
            Ok(b) if b >= 1 => Ok(Self::Fixed(b)),
            _ => Err(format!("expected a positive integer or \"auto\", got {s:?}")),
        }
    }
}

pub fn parse_tests(list: &str) -> Result<Vec<TestKind>> {
    let mut out = Vec::new();
    for item in list.split(',').filter(|s| !s.trim().is_empty()) {
        let t = TestKind::parse(item)?;
        if !out.contains(&t) {
            out.push(t);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("--tests needs at least one of UIT, MS, MK, DH".into()));
    }
    Ok(out)
}
