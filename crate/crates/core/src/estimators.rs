//! Extremal index estimators.
//!
//! All three work on exceedance indicators only, so they are invariant under
//! strictly increasing transformations of the data and threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exceedance::{ExceedanceSummary, ThresholdSpec};
use crate::process::SamplePath;

pub const DEFAULT_RUN_LEN: usize = 5;
pub const MIN_BLOCKS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EstimatorMethod {
    Blocks,
    Runs,
    Intervals,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub method: EstimatorMethod,
    /// Estimate clamped to (0, 1].
    pub value: f64,
    /// Estimate before clamping.
    pub raw: f64,
    pub clamped: bool,
    pub n_exceedances: usize,
    pub threshold: Option<f64>,
    pub n: Option<usize>,
}

impl ThetaEstimate {
    fn new(method: EstimatorMethod, raw: f64, n_exceedances: usize) -> Self {
        // A non-positive raw value is lifted to one cluster among all exceedances.
        let floor = 1.0 / n_exceedances.max(1) as f64;
        let value = if raw > 1.0 {
            1.0
        } else if raw > 0.0 {
            raw
        } else {
            floor
        };
        Self {
            method,
            value,
            raw,
            clamped: value != raw,
            n_exceedances,
            threshold: None,
            n: None,
        }
    }

    fn with_window(mut self, u: f64, n: usize) -> Self {
        self.threshold = Some(u);
        self.n = Some(n);
        self
    }
}

/// `ceil(2/ρ̂)`.
pub fn default_block_len(rho_hat: f64) -> usize {
    (2.0 / rho_hat).ceil().max(1.0) as usize
}

/// Ferro–Segers intervals estimator from inter-exceedance gaps.
pub fn intervals_estimator(gaps: &[usize]) -> Result<ThetaEstimate> {
    if gaps.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "intervals estimator needs at least 2 gaps, got {}",
            gaps.len()
        )));
    }
    let count = gaps.len() as f64;
    let max_gap = gaps.iter().copied().max().unwrap_or(0);
    let raw = if max_gap <= 2 {
        let s: f64 = gaps.iter().map(|&t| t as f64).sum();
        let s2: f64 = gaps.iter().map(|&t| (t as f64).powi(2)).sum();
        2.0 * s * s / (count * s2)
    } else {
        let s: f64 = gaps.iter().map(|&t| t as f64 - 1.0).sum();
        let s2: f64 = gaps.iter().map(|&t| (t as f64 - 1.0) * (t as f64 - 2.0)).sum();
        2.0 * s * s / (count * s2)
    };
    Ok(ThetaEstimate::new(EstimatorMethod::Intervals, raw, gaps.len() + 1))
}

pub fn blocks_estimator(path: &SamplePath, spec: &ThresholdSpec, block_len: usize) -> Result<ThetaEstimate> {
    blocks_estimator_values(&path.values, spec.u, block_len)
}

/// Blocks estimator: `ln(share of blocks without exceedance) / (b ln(1 - ρ̂))`.
pub fn blocks_estimator_values(values: &[f64], u: f64, block_len: usize) -> Result<ThetaEstimate> {
    if block_len == 0 {
        return Err(Error::param("block_len", "must be positive"));
    }
    let blocks = values.len() / block_len;
    if blocks < MIN_BLOCKS {
        return Err(Error::Usage(format!(
            "block length {block_len} leaves {blocks} blocks; at least {MIN_BLOCKS} are required"
        )));
    }
    let used = &values[..blocks * block_len];
    let mut exceedances = 0usize;
    let mut quiet_blocks = 0usize;
    for block in used.chunks_exact(block_len) {
        let hits = block.iter().filter(|&&x| x > u).count();
        exceedances += hits;
        if hits == 0 {
            quiet_blocks += 1;
        }
    }
    if exceedances < 2 {
        return Err(Error::InsufficientData(format!(
            "blocks estimator needs at least 2 exceedances, got {exceedances}"
        )));
    }
    if quiet_blocks == 0 {
        return Err(Error::InsufficientData("every block contains an exceedance".into()));
    }
    let rho_hat = exceedances as f64 / used.len() as f64;
    let share = quiet_blocks as f64 / blocks as f64;
    let raw = share.ln() / (block_len as f64 * (-rho_hat).ln_1p());
    Ok(ThetaEstimate::new(EstimatorMethod::Blocks, raw, exceedances).with_window(u, values.len()))
}

pub fn runs_estimator(path: &SamplePath, spec: &ThresholdSpec, run_len: usize) -> Result<ThetaEstimate> {
    runs_estimator_values(&path.values, spec.u, run_len)
}

/// Runs estimator: share of exceedances followed by `run_len` non-exceedances.
pub fn runs_estimator_values(values: &[f64], u: f64, run_len: usize) -> Result<ThetaEstimate> {
    if run_len == 0 {
        return Err(Error::param("run_len", "must be positive"));
    }
    let n = values.len();
    let summary = ExceedanceSummary::from_values(values, u);
    let idx = &summary.indices;
    let eligible = idx.iter().take_while(|&&i| i + run_len <= n).count();
    if eligible == 0 {
        return Err(Error::InsufficientData(format!(
            "no exceedance at index <= n - run_len = {}",
            n.saturating_sub(run_len)
        )));
    }
    let cluster_ends = (0..eligible)
        .filter(|&k| idx.get(k + 1).is_none_or(|&next| next > idx[k] + run_len))
        .count();
    let raw = cluster_ends as f64 / eligible as f64;
    Ok(ThetaEstimate::new(EstimatorMethod::Runs, raw, idx.len()).with_window(u, n))
}
