//! Thresholds, exceedance extraction and discrete mass functions.
//!
//! Positions are 1-based: a first hitting time of 1 means `X_1` already
//! exceeds the threshold. Exceedance is strict (`X > u`), so ties at an
//! empirical threshold count as non-exceedances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::{ProcessModel, SamplePath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ThresholdMethod {
    /// Exact `(1-ρ)` quantile of the model marginal, so `P{X > u} = ρ`.
    #[default]
    TheoreticalQuantile,
    /// Order statistic of rank `ceil((1-ρ) n)` of the path itself.
    EmpiricalQuantile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub n: usize,
    /// `None` when ρ was given directly.
    pub tau: Option<f64>,
    pub rho: f64,
    pub u: f64,
    pub method: ThresholdMethod,
}

/// Threshold with `ρ = τ/n`.
pub fn make_threshold(
    model: &ProcessModel,
    n: usize,
    tau: f64,
    method: ThresholdMethod,
    path: Option<&SamplePath>,
) -> Result<ThresholdSpec> {
    if n == 0 {
        return Err(Error::param("n", "must be positive"));
    }
    if tau.is_nan() || tau <= 0.0 {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    if tau >= n as f64 {
        return Err(Error::Domain(format!("tau = {tau} must be below n = {n}")));
    }
    let mut spec = make_threshold_with_rho(model, n, tau / n as f64, method, path)?;
    spec.tau = Some(tau);
    Ok(spec)
}

/// Threshold for an exceedance probability `ρ` given directly.
pub fn make_threshold_with_rho(
    model: &ProcessModel,
    n: usize,
    rho: f64,
    method: ThresholdMethod,
    path: Option<&SamplePath>,
) -> Result<ThresholdSpec> {
    if n == 0 {
        return Err(Error::param("n", "must be positive"));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("rho must lie in (0, 1), got {rho}")));
    }
    let u = match method {
        ThresholdMethod::TheoreticalQuantile => model.marginal_quantile(1.0 - rho)?,
        ThresholdMethod::EmpiricalQuantile => {
            let path =
                path.ok_or_else(|| Error::Usage("empirical quantile threshold requires a sample path".into()))?;
            if path.len() != n {
                return Err(Error::Usage(format!("path length {} differs from n = {n}", path.len())));
            }
            empirical_quantile(&path.values, rho)
        }
    };
    Ok(ThresholdSpec {
        n,
        tau: None,
        rho,
        u,
        method,
    })
}

/// Value of rank `ceil((1-ρ) n)` among the sorted values.
fn empirical_quantile(values: &[f64], rho: f64) -> f64 {
    let n = values.len();
    // Guard against 0.8 * 10 = 8.000000000000002 style rounding.
    let rank = ((1.0 - rho) * n as f64 - 1e-9).ceil().clamp(1.0, n as f64) as usize;
    let mut sorted = values.to_vec();
    let (_, kth, _) = sorted.select_nth_unstable_by(rank - 1, f64::total_cmp);
    *kth
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceedanceSummary {
    /// Strictly increasing 1-based positions with `X_j > u`.
    pub indices: Vec<usize>,
    pub n: usize,
    /// True iff no position exceeds the threshold.
    pub censored: bool,
}

impl ExceedanceSummary {
    pub fn from_values(values: &[f64], u: f64) -> Self {
        let indices: Vec<usize> = values
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > u)
            .map(|(i, _)| i + 1)
            .collect();
        Self {
            censored: indices.is_empty(),
            indices,
            n: values.len(),
        }
    }

    pub fn count(&self) -> usize {
        self.indices.len()
    }

    /// Index of the k-th exceedance, `None` if the path holds fewer than `k`.
    pub fn hitting_time(&self, k: usize) -> Result<Option<usize>> {
        if k == 0 {
            return Err(Error::Domain("hitting-time order k must be at least 1".into()));
        }
        Ok(self.indices.get(k - 1).copied())
    }

    /// Differences of consecutive exceedance indices.
    ///
    /// A gap of `j` means the `j - 1` intermediate observations stay at or
    /// below `u` and the one at offset `j` exceeds it.
    pub fn inter_exceedance_gaps(&self) -> Vec<usize> {
        self.indices.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

pub fn summarize_exceedances(path: &SamplePath, spec: &ThresholdSpec) -> Result<ExceedanceSummary> {
    if path.len() != spec.n {
        return Err(Error::Usage(format!(
            "path length {} differs from threshold horizon n = {}",
            path.len(),
            spec.n
        )));
    }
    Ok(ExceedanceSummary::from_values(&path.values, spec.u))
}

/// Mass function on `{1..J}` plus an overflow bucket for everything beyond `J`.
///
/// Analytic laws may be defective: their total need not equal 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePmf {
    mass: Vec<f64>,
    tail_mass: f64,
    sample_count: u64,
}

impl DiscretePmf {
    pub fn new(mass: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::Usage("support_max must be at least 1".into()));
        }
        if let Some(bad) = mass
            .iter()
            .chain(std::iter::once(&tail_mass))
            .find(|m| !m.is_finite() || **m < 0.0)
        {
            return Err(Error::Domain(format!(
                "masses must be finite and nonnegative, got {bad}"
            )));
        }
        Ok(Self {
            mass,
            tail_mass,
            sample_count: 0,
        })
    }

    /// Tabulates `f(j)` for `j = 1..=support_max`.
    pub fn from_fn(support_max: usize, tail_mass: f64, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((1..=support_max).map(f).collect(), tail_mass)
    }

    pub fn support_max(&self) -> usize {
        self.mass.len()
    }

    /// Mass at `j`; zero outside `1..=J`.
    pub fn get(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.mass.get(j - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn sample_count(&self) -> u64 {
        self.sample_count
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum::<f64>() + self.tail_mass
    }

    /// `P{T ≥ j}` including the overflow bucket.
    pub fn survival_from(&self, j: usize) -> f64 {
        let start = j.max(1) - 1;
        self.mass.get(start..).map_or(0.0, |s| s.iter().sum::<f64>()) + self.tail_mass
    }
}

/// Integer counts on `{1..J}` with an overflow bucket.
///
/// Merging is commutative and associative, so replications can be reduced in
/// any order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountHistogram {
    counts: Vec<u64>,
    overflow: u64,
}

impl CountHistogram {
    pub fn new(support_max: usize) -> Self {
        Self {
            counts: vec![0; support_max],
            overflow: 0,
        }
    }

    pub fn record(&mut self, j: usize) {
        match j.checked_sub(1).and_then(|i| self.counts.get_mut(i)) {
            Some(c) => *c += 1,
            None => self.overflow += 1,
        }
    }

    /// Records an observation known only to lie beyond the support.
    pub fn record_overflow(&mut self) {
        self.overflow += 1;
    }

    pub fn merge(&mut self, other: &CountHistogram) -> Result<()> {
        if other.counts.len() != self.counts.len() {
            return Err(Error::Usage("cannot merge histograms of different support".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.overflow += other.overflow;
        Ok(())
    }

    pub fn count(&self, j: usize) -> u64 {
        j.checked_sub(1).and_then(|i| self.counts.get(i)).copied().unwrap_or(0)
    }

    pub fn overflow(&self) -> u64 {
        self.overflow
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.overflow
    }

    pub fn to_pmf(&self) -> Result<DiscretePmf> {
        let total = self.total();
        if total == 0 {
            return Err(Error::Usage("cannot normalize an empty histogram".into()));
        }
        let n = total as f64;
        Ok(DiscretePmf {
            mass: self.counts.iter().map(|&c| c as f64 / n).collect(),
            tail_mass: self.overflow as f64 / n,
            sample_count: total,
        })
    }
}

pub fn empirical_pmf(samples: &[usize], support_max: usize) -> Result<DiscretePmf> {
    if support_max == 0 {
        return Err(Error::Usage("support_max must be at least 1".into()));
    }
    if samples.is_empty() {
        return Err(Error::Usage("cannot build a pmf from no samples".into()));
    }
    let mut hist = CountHistogram::new(support_max);
    for &s in samples {
        hist.record(s);
    }
    hist.to_pmf()
}

fn check_same_support(a: &DiscretePmf, b: &DiscretePmf) -> Result<()> {
    if a.support_max() != b.support_max() {
        return Err(Error::Usage(format!(
            "support mismatch: {} vs {}",
            a.support_max(),
            b.support_max()
        )));
    }
    Ok(())
}

/// `max_j |a_j - b_j|` over the finite support.
pub fn sup_distance(a: &DiscretePmf, b: &DiscretePmf) -> Result<f64> {
    check_same_support(a, b)?;
    Ok(a.mass
        .iter()
        .zip(&b.mass)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Half the L1 distance, overflow buckets included.
pub fn tv_distance(a: &DiscretePmf, b: &DiscretePmf) -> Result<f64> {
    check_same_support(a, b)?;
    let body: f64 = a.mass.iter().zip(&b.mass).map(|(x, y)| (x - y).abs()).sum();
    Ok(0.5 * (body + (a.tail_mass - b.tail_mass).abs()))
}
