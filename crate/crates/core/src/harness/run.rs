//! Replicated experiments: simulate, extract, aggregate, compare.

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::estimators::{
    blocks_estimator_values, default_block_len, intervals_estimator, runs_estimator_values, EstimatorMethod,
    ThetaEstimate,
};
use crate::exceedance::{
    make_threshold_with_rho, sup_distance, tv_distance, CountHistogram, DiscretePmf, ExceedanceSummary, ThresholdMethod,
};
use crate::laws::{self, HittingMeanLimits, LawParams};
use crate::process::simulate;

/// Normal quantile for two-sided 95% intervals.
const Z95: f64 = 1.959963984540054;
/// Residuals of the exact identities are checked on `j = 1..=IDENTITY_CHECK_MAX`.
pub const IDENTITY_CHECK_MAX: usize = 10;

/// Execution knobs that do not affect results.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl RunOptions {
    pub(crate) fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            None => Ok(f()),
            Some(threads) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValueSe {
    pub value: f64,
    pub se: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub value: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Interval {
    fn new(value: f64, se: f64) -> Self {
        Self {
            value,
            se,
            ci_low: value - Z95 * se,
            ci_high: value + Z95 * se,
        }
    }

    fn nan() -> Self {
        Self::new(f64::NAN, f64::NAN)
    }
}

/// Order-k hitting time across replications.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HittingTimeSummary {
    pub k: usize,
    pub observed: usize,
    /// Replications with fewer than k exceedances.
    pub censored: usize,
    pub censored_fraction: f64,
    /// Mean over replications that reach k exceedances.
    pub conditional_mean: Interval,
}

/// `ρ · E T*` against its two candidate limits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledMeanComparison {
    pub limits: HittingMeanLimits,
    /// `ρ̂ ·` conditional mean of `T*`.
    pub rho_hat_times_conditional_mean: Interval,
    /// Nominal `ρ ·` conditional mean of `T*`.
    pub rho_times_conditional_mean: Interval,
    /// `ρ̂ ·` geometric-likelihood mean treating censored paths as survival past `n`.
    pub rho_hat_times_censoring_aware_mean: Interval,
    pub censoring_aware_mean: Interval,
}

/// `n P{T* = n}` and `P{T* = n}/ρ` against `e^{-θτ}/θ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitAtNCheck {
    pub limit: f64,
    pub n_times_pmf_at_n_empirical: ValueSe,
    pub n_times_pmf_at_n_model: f64,
    pub pmf_at_n_over_rho_empirical: ValueSe,
    pub pmf_at_n_over_rho_model: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistancePair {
    pub sup: f64,
    /// Sampling SE of the empirical bin attaining the sup.
    pub sup_se: f64,
    pub tv: f64,
}

impl DistancePair {
    fn nan() -> Self {
        Self {
            sup: f64::NAN,
            sup_se: f64::NAN,
            tv: f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distances {
    pub tstar_vs_normalized_law: DistancePair,
    pub tstar_vs_raw_law: DistancePair,
    pub t1_vs_raw_law: DistancePair,
    pub t1_vs_normalized_law: DistancePair,
}

/// Empirical residual of one exact identity at one `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub j: usize,
    /// `P̂{T*=j} - ρ̂ P̂{T_1 ≥ j}`.
    pub renewal_residual: f64,
    pub renewal_se: f64,
    pub renewal_within_3se: bool,
    /// `P̂{T_1=j} - (P̂{T*=j} - P̂{T*=j+1})/ρ̂`.
    pub stationarity_residual: f64,
    pub stationarity_se: f64,
    pub stationarity_within_3se: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorSummary {
    pub method: EstimatorMethod,
    pub successes: usize,
    pub failures: usize,
    pub clamped: usize,
    pub mean: f64,
    pub sd: f64,
    pub mean_abs_error: f64,
}

/// One row of the per-`j` comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub j: usize,
    pub emp_tstar: f64,
    pub emp_t1: f64,
    pub eq17: f64,
    pub eq2a_raw: f64,
    pub eq14_norm: f64,
    pub id4_residual: f64,
    pub id13_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub theta_true: f64,
    pub n: usize,
    pub tau: f64,
    pub rho: f64,
    /// Common threshold; `None` when each path uses its own empirical quantile.
    pub threshold: Option<f64>,
    pub support_max: usize,
    pub replications: usize,
    pub rho_hat: ValueSe,
    pub total_exceedances: u64,
    pub total_gaps: u64,
    pub hitting_times: Vec<HittingTimeSummary>,
    pub scaled_mean: ScaledMeanComparison,
    pub limit_at_n: LimitAtNCheck,
    pub distances: Distances,
    pub identity_checks: Vec<IdentityCheck>,
    pub estimators: Vec<EstimatorSummary>,
    /// Intervals estimator on the gaps pooled over all replications.
    pub pooled_intervals: Option<ThetaEstimate>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub table: Vec<TableRow>,
    /// Unconditional pmf of the k-th hitting time, `k = 1..=k_max`; censored
    /// replications sit in the overflow bucket.
    #[serde(skip)]
    pub kth_pmfs: Vec<DiscretePmf>,
}

impl ExperimentReport {
    pub fn censored_count(&self) -> usize {
        self.hitting_times.first().map_or(0, |h| h.censored)
    }

    pub fn identities_hold(&self) -> bool {
        self.identity_checks
            .iter()
            .all(|c| c.renewal_within_3se && c.stationarity_within_3se)
    }

    pub fn estimator(&self, method: EstimatorMethod) -> Option<&EstimatorSummary> {
        self.estimators.iter().find(|e| e.method == method)
    }
}

/// Default histogram support: `min(ceil(10/(θρ)), n)`. Hitting times never
/// exceed `n` and gaps never reach it, so larger bins are structurally empty.
pub fn default_support_max(theta: f64, rho: f64, n: usize) -> usize {
    let geometric = (10.0 / (theta * rho)).ceil();
    if geometric >= n as f64 {
        n
    } else {
        (geometric as usize).max(1)
    }
}

struct ReplicationOutcome {
    hitting: Vec<Option<usize>>,
    gaps: Vec<usize>,
    exceedances: usize,
    estimates: Vec<Option<ThetaEstimate>>,
}

fn run_replication(
    config: &ExperimentConfig,
    n: usize,
    rho: f64,
    u: Option<f64>,
    r: u64,
) -> Result<ReplicationOutcome> {
    let path = simulate(config.model, n, config.seed, r)?;
    let u = match u {
        Some(u) => u,
        None => make_threshold_with_rho(&config.model, n, rho, ThresholdMethod::EmpiricalQuantile, Some(&path))?.u,
    };
    let summary = ExceedanceSummary::from_values(&path.values, u);
    let hitting = (1..=config.k_max)
        .map(|k| summary.hitting_time(k))
        .collect::<Result<Vec<_>>>()?;
    let gaps = summary.inter_exceedance_gaps();
    let exceedances = summary.count();
    let estimates = config
        .estimators
        .iter()
        .map(|method| {
            let est = match method {
                EstimatorMethod::Intervals => intervals_estimator(&gaps),
                EstimatorMethod::Runs => runs_estimator_values(&path.values, u, config.run_len),
                EstimatorMethod::Blocks => {
                    if exceedances == 0 {
                        return None;
                    }
                    let block_len = config
                        .block_len
                        .unwrap_or_else(|| default_block_len(exceedances as f64 / n as f64));
                    blocks_estimator_values(&path.values, u, block_len)
                }
            };
            est.ok()
        })
        .collect();
    Ok(ReplicationOutcome {
        hitting,
        gaps,
        exceedances,
        estimates,
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment_with(config, &RunOptions::default())
}

/// Runs all replications, in parallel, and aggregates them in replication
/// order so the report does not depend on scheduling.
pub fn run_experiment_with(config: &ExperimentConfig, options: &RunOptions) -> Result<ExperimentReport> {
    config.validate()?;
    let n = config.path_len()?;
    let (tau, rho) = config.tau_rho(n);
    let theta = config.model.true_theta();
    let threshold = match config.threshold_method {
        ThresholdMethod::TheoreticalQuantile => Some(config.model.marginal_quantile(1.0 - rho)?),
        ThresholdMethod::EmpiricalQuantile => None,
    };
    let outcomes = options.install(|| {
        (0..config.replications as u64)
            .into_par_iter()
            .map(|r| run_replication(config, n, rho, threshold, r))
            .collect::<Result<Vec<_>>>()
    })??;
    aggregate(config, n, tau, rho, theta, threshold, &outcomes)
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    if m < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    (mean, var.sqrt())
}

/// Binomial variance of a proportion with two pseudo-successes and two
/// pseudo-failures, so empty bins still carry sampling uncertainty.
fn smoothed_proportion(count: u64, trials: usize) -> f64 {
    (count as f64 + 2.0) / (trials as f64 + 4.0)
}

/// Linearized variance of the ratio estimator `Σ a_r / Σ g_r` over
/// independent replications.
fn ratio_variance(numer: &[f64], denom: &[f64]) -> f64 {
    let total: f64 = denom.iter().sum();
    let r = numer.len();
    if total == 0.0 || r < 2 {
        return f64::NAN;
    }
    let ratio = numer.iter().sum::<f64>() / total;
    let ss: f64 = numer.iter().zip(denom).map(|(a, g)| (a - ratio * g).powi(2)).sum();
    ss / (total * total) * r as f64 / (r - 1) as f64
}

fn distance_pair(empirical: &DiscretePmf, law: &DiscretePmf, trials: usize) -> Result<DistancePair> {
    let sup = sup_distance(empirical, law)?;
    let tv = tv_distance(empirical, law)?;
    let argmax = empirical
        .masses()
        .iter()
        .zip(law.masses())
        .map(|(a, b)| (a - b).abs())
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |best, (i, d)| if d > best.1 { (i, d) } else { best },
        )
        .0;
    let p = empirical.masses()[argmax];
    let count = (p * trials as f64).round() as u64;
    let pt = smoothed_proportion(count, trials);
    Ok(DistancePair {
        sup,
        sup_se: (pt * (1.0 - pt) / trials as f64).sqrt(),
        tv,
    })
}

fn aggregate(
    config: &ExperimentConfig,
    n: usize,
    tau: f64,
    rho: f64,
    theta: f64,
    threshold: Option<f64>,
    outcomes: &[ReplicationOutcome],
) -> Result<ExperimentReport> {
    let reps = outcomes.len();
    let support = config.support_max.unwrap_or_else(|| default_support_max(theta, rho, n));
    let params = LawParams::new(rho, theta)?;
    let mut warnings = Vec::new();

    // Exceedance rate with replication-level variance.
    let rates: Vec<f64> = outcomes.iter().map(|o| o.exceedances as f64 / n as f64).collect();
    let (rho_hat, rate_sd) = mean_sd(&rates);
    let rho_hat_var = if reps > 1 {
        rate_sd * rate_sd / reps as f64
    } else {
        f64::NAN
    };
    let total_exceedances: u64 = outcomes.iter().map(|o| o.exceedances as u64).sum();
    if total_exceedances == 0 {
        warnings.push(format!(
            "no exceedance in any of {reps} replications; empirical pmfs are empty"
        ));
    }

    // First hitting time: counts on 1..=J+1 so the stationarity residual at J is defined.
    let mut first_counts = vec![0u64; support + 2];
    let mut kth_hists: Vec<CountHistogram> = (0..config.k_max).map(|_| CountHistogram::new(support)).collect();
    let mut kth_values: Vec<Vec<f64>> = vec![Vec::new(); config.k_max];
    let mut censored = vec![0usize; config.k_max];
    for o in outcomes {
        for (k, h) in o.hitting.iter().enumerate() {
            match h {
                Some(t) => {
                    kth_hists[k].record(*t);
                    kth_values[k].push(*t as f64);
                }
                None => {
                    kth_hists[k].record_overflow();
                    censored[k] += 1;
                }
            }
        }
        if let Some(Some(t)) = o.hitting.first() {
            if *t <= support + 1 {
                first_counts[*t] += 1;
            }
        }
    }
    let kth_pmfs = kth_hists
        .iter()
        .map(CountHistogram::to_pmf)
        .collect::<Result<Vec<_>>>()?;
    let hitting_times: Vec<HittingTimeSummary> = (0..config.k_max)
        .map(|k| {
            let (mean, sd) = mean_sd(&kth_values[k]);
            let observed = kth_values[k].len();
            HittingTimeSummary {
                k: k + 1,
                observed,
                censored: censored[k],
                censored_fraction: censored[k] as f64 / reps as f64,
                conditional_mean: Interval::new(mean, sd / (observed as f64).sqrt()),
            }
        })
        .collect();
    if censored[0] > 0 {
        warnings.push(format!(
            "{} of {reps} replications have no exceedance within n = {n}",
            censored[0]
        ));
    }

    // Pooled gaps.
    let mut gap_hist = CountHistogram::new(support);
    for o in outcomes {
        o.gaps.iter().for_each(|&g| gap_hist.record(g));
    }
    let total_gaps = gap_hist.total();
    let gap_pmf = if total_gaps > 0 { Some(gap_hist.to_pmf()?) } else { None };
    let tstar_pmf = &kth_pmfs[0];
    let p_tstar = |j: usize| first_counts[j] as f64 / reps as f64;

    // Per-j table. Gap survival counts P{T_1 >= j} as exact integer suffix sums.
    let mut gap_at_least = vec![gap_hist.overflow(); support + 2];
    for j in (1..=support).rev() {
        gap_at_least[j] = gap_at_least[j + 1] + gap_hist.count(j);
    }
    let table: Vec<TableRow> = (1..=support)
        .map(|j| {
            let (emp_t1, surv) = match &gap_pmf {
                Some(p) => (p.get(j), gap_at_least[j] as f64 / total_gaps as f64),
                None => (f64::NAN, f64::NAN),
            };
            TableRow {
                j,
                emp_tstar: p_tstar(j),
                emp_t1,
                eq17: laws::tstar_pmf_asymptotic(&params, j),
                eq2a_raw: laws::t1_pmf_raw(&params, j),
                eq14_norm: laws::t1_pmf_normalized(&params, j),
                id4_residual: p_tstar(j) - rho_hat * surv,
                id13_residual: emp_t1 - (p_tstar(j) - p_tstar(j + 1)) / rho_hat,
            }
        })
        .collect();
    let identity_checks = identity_checks(outcomes, reps, rho_hat, rho_hat_var, &first_counts, support);

    // Means and their limits.
    let (mean1, sd1) = mean_sd(&kth_values[0]);
    let observed1 = kth_values[0].len();
    let mean_var = sd1 * sd1 / observed1 as f64;
    let scaled = |scale: f64, scale_var: f64, mean: f64, mvar: f64| {
        Interval::new(scale * mean, (scale * scale * mvar + mean * mean * scale_var).sqrt())
    };
    let censoring_aware_mean = if observed1 > 0 {
        let time_on_test = kth_values[0].iter().sum::<f64>() + censored[0] as f64 * n as f64;
        let m = time_on_test / observed1 as f64;
        Interval::new(m, m / (observed1 as f64).sqrt())
    } else {
        Interval::nan()
    };
    let scaled_mean = ScaledMeanComparison {
        limits: laws::expected_hitting_limits(theta, tau)?,
        rho_hat_times_conditional_mean: scaled(rho_hat, rho_hat_var, mean1, mean_var),
        rho_times_conditional_mean: scaled(rho, 0.0, mean1, mean_var),
        rho_hat_times_censoring_aware_mean: scaled(
            rho_hat,
            rho_hat_var,
            censoring_aware_mean.value,
            censoring_aware_mean.se.powi(2),
        ),
        censoring_aware_mean,
    };

    // Behaviour at j = n.
    let at_n = kth_values[0].iter().filter(|&&t| t as usize == n).count() as u64;
    let p_at_n = at_n as f64 / reps as f64;
    let pt = smoothed_proportion(at_n, reps);
    let se_at_n = (pt * (1.0 - pt) / reps as f64).sqrt();
    let limit_at_n = LimitAtNCheck {
        limit: laws::limit_at_n_target(theta, tau),
        n_times_pmf_at_n_empirical: ValueSe {
            value: n as f64 * p_at_n,
            se: n as f64 * se_at_n,
        },
        n_times_pmf_at_n_model: laws::tstar_pmf_limit_at_n(theta, tau, n)?,
        pmf_at_n_over_rho_empirical: ValueSe {
            value: p_at_n / rho_hat,
            se: se_at_n / rho_hat,
        },
        pmf_at_n_over_rho_model: laws::tstar_pmf_over_rho_at_n(theta, tau, n)?,
    };

    let distances = Distances {
        tstar_vs_normalized_law: distance_pair(tstar_pmf, &laws::tstar_normalized_pmf(&params, support)?, reps)?,
        tstar_vs_raw_law: distance_pair(tstar_pmf, &laws::tstar_asymptotic_pmf(&params, support)?, reps)?,
        t1_vs_raw_law: match &gap_pmf {
            Some(p) => distance_pair(p, &laws::t1_raw_pmf(&params, support)?, total_gaps as usize)?,
            None => DistancePair::nan(),
        },
        t1_vs_normalized_law: match &gap_pmf {
            Some(p) => distance_pair(p, &laws::t1_normalized_pmf(&params, support)?, total_gaps as usize)?,
            None => DistancePair::nan(),
        },
    };

    let estimators = config
        .estimators
        .iter()
        .enumerate()
        .map(|(i, &method)| {
            let values: Vec<f64> = outcomes
                .iter()
                .filter_map(|o| o.estimates[i].map(|e| e.value))
                .collect();
            let clamped = outcomes
                .iter()
                .filter(|o| o.estimates[i].is_some_and(|e| e.clamped))
                .count();
            let (mean, sd) = mean_sd(&values);
            let mae = if values.is_empty() {
                f64::NAN
            } else {
                values.iter().map(|v| (v - theta).abs()).sum::<f64>() / values.len() as f64
            };
            EstimatorSummary {
                method,
                successes: values.len(),
                failures: reps - values.len(),
                clamped,
                mean,
                sd,
                mean_abs_error: mae,
            }
        })
        .collect();
    let pooled_gaps: Vec<usize> = outcomes.iter().flat_map(|o| o.gaps.iter().copied()).collect();
    let pooled_intervals = intervals_estimator(&pooled_gaps).ok();

    Ok(ExperimentReport {
        config: config.clone(),
        theta_true: theta,
        n,
        tau,
        rho,
        threshold,
        support_max: support,
        replications: reps,
        rho_hat: ValueSe {
            value: rho_hat,
            se: rho_hat_var.sqrt(),
        },
        total_exceedances,
        total_gaps,
        hitting_times,
        scaled_mean,
        limit_at_n,
        distances,
        identity_checks,
        estimators,
        pooled_intervals,
        warnings,
        table,
        kth_pmfs,
    })
}

/// Residuals of the renewal and stationarity identities with combined SEs.
///
/// Gap proportions use ratio-estimator variances over replications, which
/// accounts for dependence between gaps from the same path.
fn identity_checks(
    outcomes: &[ReplicationOutcome],
    reps: usize,
    rho_hat: f64,
    rho_hat_var: f64,
    first_counts: &[u64],
    support: usize,
) -> Vec<IdentityCheck> {
    let jmax = IDENTITY_CHECK_MAX.min(support);
    let gap_counts: Vec<f64> = outcomes.iter().map(|o| o.gaps.len() as f64).collect();
    let total_gaps: f64 = gap_counts.iter().sum();
    let tstar_prop = |j: usize| first_counts[j] as f64 / reps as f64;
    let tstar_smooth = |j: usize| smoothed_proportion(first_counts[j], reps);

    (1..=jmax)
        .map(|j| {
            let at_least: Vec<f64> = outcomes
                .iter()
                .map(|o| o.gaps.iter().filter(|&&g| g >= j).count() as f64)
                .collect();
            let exactly: Vec<f64> = outcomes
                .iter()
                .map(|o| o.gaps.iter().filter(|&&g| g == j).count() as f64)
                .collect();
            let surv = at_least.iter().sum::<f64>() / total_gaps;
            let p1 = exactly.iter().sum::<f64>() / total_gaps;

            let ps = tstar_smooth(j);
            let renewal_residual = tstar_prop(j) - rho_hat * surv;
            let renewal_var = ps * (1.0 - ps) / reps as f64
                + surv * surv * rho_hat_var
                + rho_hat * rho_hat * ratio_variance(&at_least, &gap_counts);
            let renewal_se = renewal_var.sqrt();

            let diff = tstar_prop(j) - tstar_prop(j + 1);
            let ps_next = tstar_smooth(j + 1);
            let diff_var = (ps + ps_next - (ps - ps_next).powi(2)) / reps as f64;
            let stationarity_residual = p1 - diff / rho_hat;
            let stationarity_var = ratio_variance(&exactly, &gap_counts)
                + diff_var / rho_hat.powi(2)
                + diff * diff * rho_hat_var / rho_hat.powi(4);
            let stationarity_se = stationarity_var.sqrt();

            IdentityCheck {
                j,
                renewal_residual,
                renewal_se,
                renewal_within_3se: renewal_residual.abs() <= 3.0 * renewal_se,
                stationarity_residual,
                stationarity_se,
                stationarity_within_3se: stationarity_residual.abs() <= 3.0 * stationarity_se,
            }
        })
        .collect()
}
