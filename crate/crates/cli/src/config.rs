//! JSON experiment configurations. The top-level object has exactly one key
//! naming the experiment, e.g. `{"copula_convergence": {...}}`.

use std::path::{Path, PathBuf};

use condcopula_core::{CopulaSpec, Family, Method};
use serde::{Deserialize, Serialize};

use crate::error::{config_error, Error, Result};
use crate::gamma_beta::{GammaBetaSpec, Variant};

pub const DEFAULT_SEED: u64 = 20240601;

/// Replication counts used by the full-size studies.
pub const PAPER_SCALE_REPLICATIONS: usize = 2000;
pub const PAPER_SCALE_SPLIT_REPLICATIONS: usize = 10000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Amh,
    Clayton,
    M,
    Pi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CopulaMethod {
    #[default]
    Checkerboard,
    Bernstein,
}

impl From<CopulaMethod> for Method {
    fn from(m: CopulaMethod) -> Method {
        match m {
            CopulaMethod::Checkerboard => Method::Checkerboard,
            CopulaMethod::Bernstein => Method::Bernstein,
        }
    }
}

/// Estimators compared by the regression and split benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegressionMethod {
    /// Copula-based mean.
    Cbe,
    /// Nadaraya–Watson mean.
    Nwe,
    /// Copula-based quantile, midpoint of the clamped interval.
    Cbqe,
    /// Nadaraya–Watson quantile.
    Nwqe,
    /// Copula-based expectile.
    Cbee,
    /// Copula-based conditional variance.
    Cbve,
    /// The true conditional mean, as a zero-error reference.
    Truth,
}

impl RegressionMethod {
    pub fn name(&self) -> &'static str {
        match self {
            RegressionMethod::Cbe => "cbe",
            RegressionMethod::Nwe => "nwe",
            RegressionMethod::Cbqe => "cbqe",
            RegressionMethod::Nwqe => "nwqe",
            RegressionMethod::Cbee => "cbee",
            RegressionMethod::Cbve => "cbve",
            RegressionMethod::Truth => "truth",
        }
    }
}

fn default_s() -> f64 {
    condcopula_core::DEFAULT_S_EXPONENT
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_train_fraction() -> f64 {
    0.8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub family: FamilyName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    #[serde(default)]
    pub method: CopulaMethod,
    #[serde(default = "default_s")]
    pub s_exponent: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl ConvergenceConfig {
    pub fn copula(&self) -> Result<CopulaSpec> {
        let field = "copula_convergence.theta";
        match (self.family, self.theta) {
            (FamilyName::M, None) => Ok(CopulaSpec::m()),
            (FamilyName::Pi, None) => Ok(CopulaSpec::pi()),
            (FamilyName::M | FamilyName::Pi, Some(_)) => Err(config_error(field, "this family takes no parameter")),
            (FamilyName::Amh | FamilyName::Clayton, None) => Err(config_error(field, "missing parameter")),
            (FamilyName::Amh, Some(t)) => {
                CopulaSpec::new(Family::Amh, t).map_err(|e| config_error(field, e.to_string()))
            }
            (FamilyName::Clayton, Some(t)) => {
                CopulaSpec::new(Family::Clayton, t).map_err(|e| config_error(field, e.to_string()))
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let spec = self.copula()?;
        if self.family == FamilyName::Clayton && spec.theta() < 0.0 {
            return Err(config_error("copula_convergence.theta", "sampling needs θ > 0 for Clayton"));
        }
        check_grid("copula_convergence.n_grid", &self.n_grid)?;
        check_replications("copula_convergence.replications", self.replications)?;
        check_s("copula_convergence.s_exponent", self.s_exponent)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionConfig {
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub m_eval: usize,
    pub methods: Vec<RegressionMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub method: CopulaMethod,
    #[serde(default = "default_s")]
    pub s_exponent: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl RegressionConfig {
    pub fn design(&self) -> Result<GammaBetaSpec> {
        let spec = GammaBetaSpec::new(self.variant)?;
        match self.cap {
            Some(c) => spec.with_cap(c),
            None => Ok(spec),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.design()?;
        check_grid("regression.n_grid", &self.n_grid)?;
        check_replications("regression.replications", self.replications)?;
        if self.m_eval == 0 {
            return Err(config_error("regression.m_eval", "must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(config_error("regression.methods", "must not be empty"));
        }
        let needs_tau = self.methods.iter().any(|m| matches!(m, RegressionMethod::Cbqe | RegressionMethod::Nwqe));
        match self.tau {
            None if needs_tau => return Err(config_error("regression.tau", "required by cbqe/nwqe")),
            Some(t) if !(t > 0.0 && t < 1.0) => return Err(config_error("regression.tau", "must lie in (0, 1)")),
            _ => {}
        }
        match self.alpha {
            None if self.methods.contains(&RegressionMethod::Cbee) => {
                return Err(config_error("regression.alpha", "required by cbee"))
            }
            Some(a) if !(a > 0.0 && a < 1.0) => return Err(config_error("regression.alpha", "must lie in (0, 1)")),
            _ => {}
        }
        check_s("regression.s_exponent", self.s_exponent)
    }
}

/// Two numeric CSV columns with optional log transforms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub path: PathBuf,
    pub x_column: String,
    pub y_column: String,
    #[serde(default)]
    pub log_x: bool,
    #[serde(default)]
    pub log_y: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub data: DataSpec,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    pub replications: usize,
    pub methods: Vec<RegressionMethod>,
    #[serde(default)]
    pub method: CopulaMethod,
    #[serde(default = "default_s")]
    pub s_exponent: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl SplitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(config_error("split.train_fraction", "must lie in (0, 1)"));
        }
        check_replications("split.replications", self.replications)?;
        if self.methods.is_empty() {
            return Err(config_error("split.methods", "must not be empty"));
        }
        if let Some(m) = self.methods.iter().find(|m| !matches!(m, RegressionMethod::Cbe | RegressionMethod::Nwe)) {
            return Err(config_error("split.methods", format!("`{}` has no observable target", m.name())));
        }
        check_s("split.s_exponent", self.s_exponent)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentConfig {
    CopulaConvergence(ConvergenceConfig),
    Regression(RegressionConfig),
    Split(SplitConfig),
}

impl ExperimentConfig {
    /// Parses and validates a JSON configuration; errors carry the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Config { field: path, message: e.into_inner().to_string() }
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a configuration file; relative data paths are resolved against its directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Data { path: path.display().to_string(), message: e.to_string() })?;
        let mut config = Self::from_json(&text)?;
        if let ExperimentConfig::Split(split) = &mut config {
            if split.data.path.is_relative() {
                if let Some(dir) = path.parent() {
                    split.data.path = dir.join(&split.data.path);
                }
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ExperimentConfig::CopulaConvergence(c) => c.validate(),
            ExperimentConfig::Regression(c) => c.validate(),
            ExperimentConfig::Split(c) => c.validate(),
        }
    }

    pub fn replications(&self) -> usize {
        match self {
            ExperimentConfig::CopulaConvergence(c) => c.replications,
            ExperimentConfig::Regression(c) => c.replications,
            ExperimentConfig::Split(c) => c.replications,
        }
    }

    pub fn set_replications(&mut self, r: usize) {
        match self {
            ExperimentConfig::CopulaConvergence(c) => c.replications = r,
            ExperimentConfig::Regression(c) => c.replications = r,
            ExperimentConfig::Split(c) => c.replications = r,
        }
    }

    /// Switches to the full-size replication count.
    pub fn paper_scale(&mut self) {
        let r = match self {
            ExperimentConfig::Split(_) => PAPER_SCALE_SPLIT_REPLICATIONS,
            _ => PAPER_SCALE_REPLICATIONS,
        };
        self.set_replications(r);
    }
}

fn check_grid(field: &str, grid: &[usize]) -> Result<()> {
    if grid.is_empty() {
        return Err(config_error(field, "must not be empty"));
    }
    if let Some(n) = grid.iter().find(|&&n| n < condcopula_core::MIN_FIT_SAMPLE) {
        return Err(config_error(field, format!("sample size {n} is below {}", condcopula_core::MIN_FIT_SAMPLE)));
    }
    Ok(())
}

fn check_replications(field: &str, r: usize) -> Result<()> {
    if r == 0 {
        return Err(config_error(field, "must be at least 1"));
    }
    Ok(())
}

fn check_s(field: &str, s: f64) -> Result<()> {
    if !(s > 0.0 && s < 0.5) {
        return Err(config_error(field, format!("{s} is outside (0, 0.5)")));
    }
    Ok(())
}
