use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::activations::{ActivationKind, ActivationLibrary, BaseActivation};
use crate::benchmarks::{FunctionKind, ShekelParams, TestFunction};
use crate::error::{Error, Result};
use crate::network::Architecture;
use crate::optim::{AdamConfig, EarlyStopping, TrainConfig};
use crate::tsdata::{Normalization, SplitPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Synthetic,
    Forecast,
    Pentagon,
}

/// Hidden layer widths plus either one activation for all of them or one
/// per layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub hidden: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub activation: Option<ActivationKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub activations: Option<Vec<ActivationKind>>,
}

impl NetworkConfig {
    pub fn kinds(&self) -> Result<Vec<ActivationKind>> {
        match (&self.activation, &self.activations) {
            (Some(k), None) => Ok(vec![*k; self.hidden.len()]),
            (None, Some(ks)) if ks.len() == self.hidden.len() => Ok(ks.clone()),
            (None, Some(ks)) => Err(Error::Config(format!(
                "network.activations has {} entries for {} hidden layers",
                ks.len(),
                self.hidden.len()
            ))),
            _ => Err(Error::Config(
                "network needs exactly one of 'activation' or 'activations'".into(),
            )),
        }
    }

    pub fn architecture(&self, input_dim: usize, output_dim: usize) -> Result<Architecture> {
        if self.hidden.iter().any(|&w| w == 0) {
            return Err(Error::Config("hidden widths must be positive".into()));
        }
        let kinds = self.kinds()?;
        Ok(Architecture {
            input_dim,
            hidden: self.hidden.iter().copied().zip(kinds).collect(),
            output_dim,
        })
    }

    pub fn is_learnable(&self) -> bool {
        self.kinds().map(|ks| ks.iter().any(|k| k.is_learnable())).unwrap_or(false)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    #[serde(default = "default_lr")]
    pub lr: f64,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default = "default_beta1")]
    pub beta1: f64,
    #[serde(default = "default_beta2")]
    pub beta2: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub early_stopping: Option<EarlyStopping>,
}

fn default_lr() -> f64 {
    AdamConfig::default().lr
}
fn default_beta1() -> f64 {
    AdamConfig::default().beta1
}
fn default_beta2() -> f64 {
    AdamConfig::default().beta2
}
fn default_eps() -> f64 {
    AdamConfig::default().eps
}
fn default_epochs() -> usize {
    500
}
fn default_batch() -> usize {
    256
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields defaulted")
    }
}

impl OptimizerConfig {
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            adam: AdamConfig {
                lr: self.lr,
                beta1: self.beta1,
                beta2: self.beta2,
                eps: self.eps,
            },
            early_stopping: self.early_stopping,
            frozen: Default::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("optimizer.batch_size must be at least 1".into()));
        }
        if !(self.lr > 0.0) || !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || !(self.eps > 0.0) {
            return Err(Error::Config("optimizer hyperparameters out of range".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    pub function: FunctionKind,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_train_points")]
    pub train_points: usize,
    #[serde(default = "default_eval_points")]
    pub eval_points: usize,
    /// Per-axis `[lo, hi]`; defaults to the function's standard box.
    #[serde(default)]
    pub domain: Option<Vec<(f64, f64)>>,
    #[serde(default)]
    pub shekel: Option<ShekelParams>,
    /// Points per axis of the exported surface grid (dim 2 only); 0 disables it.
    #[serde(default = "default_surface_grid")]
    pub surface_grid: usize,
}

fn default_dim() -> usize {
    2
}
fn default_train_points() -> usize {
    15_000
}
fn default_eval_points() -> usize {
    3_000
}
fn default_surface_grid() -> usize {
    101
}

impl SyntheticConfig {
    pub fn test_function(&self) -> Result<TestFunction> {
        let domain = self
            .domain
            .clone()
            .unwrap_or_else(|| vec![self.function.default_interval(); self.dim]);
        TestFunction::with_domain(self.function, self.dim, domain, self.shekel.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForecastConfig {
    /// ETT CSV path, relative to the working directory.
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default = "default_history")]
    pub history: usize,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default)]
    pub split: SplitPolicy,
    #[serde(default)]
    pub normalization: Normalization,
}

fn default_history() -> usize {
    512
}
fn default_horizon() -> usize {
    96
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PentagonConfig {
    /// Lattice points per axis over the pentagon's bounding box.
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    /// Append the five vertices and the centroid after the lattice points.
    #[serde(default = "default_true")]
    pub include_vertices: bool,
    /// Worker threads; 0 uses all cores.
    #[serde(default)]
    pub threads: usize,
}

fn default_resolution() -> usize {
    25
}
fn default_true() -> bool {
    true
}

impl Default for PentagonConfig {
    fn default() -> Self {
        Self {
            resolution: default_resolution(),
            include_vertices: true,
            threads: 0,
        }
    }
}

/// One experiment, as read from JSON. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub library: Option<Vec<BaseActivation>>,
    pub network: NetworkConfig,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forecast: Option<ForecastConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pentagon: Option<PentagonConfig>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| e.context(format!("config {}", path.display())))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn library(&self) -> Result<Option<ActivationLibrary>> {
        self.library.clone().map(ActivationLibrary::new).transpose()
    }

    pub fn validate(&self) -> Result<()> {
        self.optimizer.validate()?;
        let kinds = self.network.kinds()?;
        let learnable = kinds.iter().any(|k| k.is_learnable());
        match &self.library {
            Some(lib) => {
                ActivationLibrary::new(lib.clone())?;
            }
            None if learnable => {
                return Err(Error::Config("a learnable activation needs a non-empty 'library'".into()));
            }
            None => {}
        }
        let sections = (self.synthetic.is_some(), self.forecast.is_some(), self.pentagon.is_some());
        match self.kind {
            ExperimentKind::Synthetic => {
                if sections != (true, false, false) {
                    return Err(Error::Config("synthetic experiments take exactly a 'synthetic' section".into()));
                }
            }
            ExperimentKind::Forecast => {
                if sections != (false, true, false) {
                    return Err(Error::Config("forecast experiments take exactly a 'forecast' section".into()));
                }
                let f = self.forecast.as_ref().unwrap();
                if f.history == 0 || f.horizon == 0 {
                    return Err(Error::Config("forecast history and horizon must be positive".into()));
                }
                f.split.ranges(f.split.span_months.max(1) * 1000)?;
            }
            ExperimentKind::Pentagon => {
                if !sections.0 || sections.1 {
                    return Err(Error::Config(
                        "pentagon experiments take a 'synthetic' section and an optional 'pentagon' section".into(),
                    ));
                }
                if self.library.as_ref().map(Vec::len) != Some(5) {
                    return Err(Error::Config("pentagon sweep needs a library of exactly 5 activations".into()));
                }
                if self.pentagon.as_ref().is_some_and(|p| p.resolution < 2) {
                    return Err(Error::Config("pentagon.resolution must be at least 2".into()));
                }
            }
        }
        if let Some(s) = &self.synthetic {
            if s.train_points == 0 {
                return Err(Error::Config("synthetic.train_points must be at least 1".into()));
            }
            if self.kind == ExperimentKind::Synthetic && s.eval_points == 0 {
                return Err(Error::Config("synthetic.eval_points must be at least 1".into()));
            }
            s.test_function()?;
        }
        Ok(())
    }

    /// Copy with every defaulted field written out explicitly.
    pub fn resolved(&self) -> Result<Self> {
        let mut cfg = self.clone();
        if let Some(s) = cfg.synthetic.as_mut() {
            let f = s.test_function()?;
            s.domain = Some(f.domain.clone());
            s.shekel = f.shekel.clone();
        }
        if cfg.kind == ExperimentKind::Pentagon && cfg.pentagon.is_none() {
            cfg.pentagon = Some(PentagonConfig::default());
        }
        if cfg.network.activations.is_none() {
            cfg.network.activations = Some(cfg.network.kinds()?);
            cfg.network.activation = None;
        }
        Ok(cfg)
    }
}
