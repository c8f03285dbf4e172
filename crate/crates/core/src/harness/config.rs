use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{EstimatorMethod, DEFAULT_RUN_LEN};
use crate::exceedance::ThresholdMethod;
use crate::process::ProcessModel;

/// JSON experiment description.
///
/// ```json
/// {
///   "model": {"kind": "ARMAX", "alpha": 0.5, "marginal": "UNIT_FRECHET"},
///   "n": 10000,
///   "tau": 1.0,
///   "threshold_method": "THEORETICAL_QUANTILE",
///   "replications": 5000,
///   "seed": 42,
///   "k_max": 3,
///   "estimators": ["INTERVALS", "BLOCKS", "RUNS"],
///   "output_dir": "out/armax"
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ProcessModel,
    /// Path length. Optional when `n_grid` is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default)]
    pub threshold_method: ThresholdMethod,
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    /// Defaults to `min(ceil(10/(θρ)), n)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_max: Option<usize>,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorMethod>,
    #[serde(default = "default_run_len")]
    pub run_len: usize,
    /// Defaults to `ceil(2/ρ̂)` per path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<usize>>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_k_max() -> usize {
    1
}

fn default_run_len() -> usize {
    DEFAULT_RUN_LEN
}

fn default_estimators() -> Vec<EstimatorMethod> {
    vec![
        EstimatorMethod::Intervals,
        EstimatorMethod::Blocks,
        EstimatorMethod::Runs,
    ]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    /// Minimal config with defaults for everything but the essentials.
    pub fn new(model: ProcessModel, n: usize, tau: f64, replications: usize, seed: u64) -> Self {
        Self {
            model,
            n: Some(n),
            tau: Some(tau),
            rho: None,
            threshold_method: ThresholdMethod::default(),
            replications,
            seed,
            k_max: default_k_max(),
            support_max: None,
            estimators: default_estimators(),
            run_len: default_run_len(),
            block_len: None,
            n_grid: None,
            output_dir: default_output_dir(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config JSON: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.model
            .validate()
            .map_err(|e| Error::Config(format!("model: {e}")))?;
        match (self.tau, self.rho) {
            (Some(_), Some(_)) => return Err(Error::Config("set exactly one of `tau` and `rho`, not both".into())),
            (None, None) => return Err(Error::Config("one of `tau` or `rho` is required".into())),
            (Some(tau), None) if !(tau > 0.0 && tau.is_finite()) => {
                return Err(Error::Config(format!("`tau` must be positive, got {tau}")))
            }
            (None, Some(rho)) if !(rho > 0.0 && rho < 1.0) => {
                return Err(Error::Config(format!("`rho` must lie in (0, 1), got {rho}")))
            }
            _ => {}
        }
        if self.replications == 0 {
            return Err(Error::Config("`replications` must be at least 1".into()));
        }
        if self.k_max == 0 {
            return Err(Error::Config("`k_max` must be at least 1".into()));
        }
        if self.support_max == Some(0) {
            return Err(Error::Config("`support_max` must be at least 1".into()));
        }
        if self.run_len == 0 {
            return Err(Error::Config("`run_len` must be at least 1".into()));
        }
        if self.block_len == Some(0) {
            return Err(Error::Config("`block_len` must be at least 1".into()));
        }
        match &self.n_grid {
            Some(grid) => {
                if grid.len() < 3 {
                    return Err(Error::Config("`n_grid` needs at least 3 points".into()));
                }
                if !grid.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::Config("`n_grid` must be strictly increasing".into()));
                }
                if self.tau.is_none() {
                    return Err(Error::Config(
                        "`n_grid` requires `tau` so that rho = tau/n varies with n".into(),
                    ));
                }
                for &n in grid {
                    self.check_n(n)?;
                }
            }
            None => {
                let n = self
                    .n
                    .ok_or_else(|| Error::Config("`n` is required without `n_grid`".into()))?;
                self.check_n(n)?;
            }
        }
        Ok(())
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::Config("path length must be positive".into()));
        }
        if let Some(tau) = self.tau {
            if tau >= n as f64 {
                return Err(Error::Config(format!("`tau` = {tau} must be below n = {n}")));
            }
        }
        Ok(())
    }

    /// Config for one grid point of a convergence study.
    pub fn at_n(&self, n: usize) -> Self {
        Self {
            n: Some(n),
            n_grid: None,
            ..self.clone()
        }
    }

    pub(crate) fn path_len(&self) -> Result<usize> {
        self.n
            .ok_or_else(|| Error::Config("`n` is required for a single experiment".into()))
    }

    /// `(τ, ρ)` for path length `n`.
    pub(crate) fn tau_rho(&self, n: usize) -> (f64, f64) {
        match (self.tau, self.rho) {
            (Some(tau), _) => (tau, tau / n as f64),
            (None, Some(rho)) => (rho * n as f64, rho),
            (None, None) => unreachable!("validated config sets tau or rho"),
        }
    }
}
