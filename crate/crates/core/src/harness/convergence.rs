use serde::Serialize;

use super::config::ExperimentConfig;
use super::run::{run_experiment_with, ExperimentReport, Interval, RunOptions};
use crate::error::{Error, Result};
use crate::laws::HittingMeanLimits;

/// Distances and scaled means at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendPoint {
    pub n: usize,
    pub rho: f64,
    pub tstar_sup: f64,
    pub tstar_sup_se: f64,
    pub tstar_tv: f64,
    pub t1_sup: f64,
    pub t1_sup_se: f64,
    pub t1_tv: f64,
    pub rho_hat_times_conditional_mean: Interval,
    pub rho_hat_times_censoring_aware_mean: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendSummary {
    pub points: Vec<TrendPoint>,
    /// Hitting-time sup distance to the normalized law never rises by more
    /// than 2 combined SEs between consecutive grid points.
    pub tstar_sup_non_increasing: bool,
    /// Same for the gap pmf against the raw gap law.
    pub t1_sup_non_increasing: bool,
    pub limits: HittingMeanLimits,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub trend: TrendSummary,
    #[serde(skip)]
    pub reports: Vec<ExperimentReport>,
}

/// True when each step rises by at most `2·sqrt(se_i² + se_{i+1}²)`.
pub fn non_increasing_within_2se(values: &[f64], ses: &[f64]) -> bool {
    values
        .windows(2)
        .zip(ses.windows(2))
        .all(|(d, s)| d[1] <= d[0] + 2.0 * (s[0] * s[0] + s[1] * s[1]).sqrt())
}

pub fn convergence_study(config: &ExperimentConfig) -> Result<ConvergenceStudy> {
    convergence_study_with(config, &RunOptions::default())
}

pub fn convergence_study_with(config: &ExperimentConfig, options: &RunOptions) -> Result<ConvergenceStudy> {
    config.validate()?;
    let grid = config
        .n_grid
        .as_ref()
        .ok_or_else(|| Error::Config("convergence study requires `n_grid`".into()))?;
    let reports = grid
        .iter()
        .map(|&n| run_experiment_with(&config.at_n(n), options))
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<TrendPoint> = reports
        .iter()
        .map(|r| TrendPoint {
            n: r.n,
            rho: r.rho,
            tstar_sup: r.distances.tstar_vs_normalized_law.sup,
            tstar_sup_se: r.distances.tstar_vs_normalized_law.sup_se,
            tstar_tv: r.distances.tstar_vs_normalized_law.tv,
            t1_sup: r.distances.t1_vs_raw_law.sup,
            t1_sup_se: r.distances.t1_vs_raw_law.sup_se,
            t1_tv: r.distances.t1_vs_raw_law.tv,
            rho_hat_times_conditional_mean: r.scaled_mean.rho_hat_times_conditional_mean,
            rho_hat_times_censoring_aware_mean: r.scaled_mean.rho_hat_times_censoring_aware_mean,
        })
        .collect();
    let column = |f: fn(&TrendPoint) -> f64| points.iter().map(f).collect::<Vec<_>>();
    let trend = TrendSummary {
        tstar_sup_non_increasing: non_increasing_within_2se(&column(|p| p.tstar_sup), &column(|p| p.tstar_sup_se)),
        t1_sup_non_increasing: non_increasing_within_2se(&column(|p| p.t1_sup), &column(|p| p.t1_sup_se)),
        limits: reports[0].scaled_mean.limits,
        points,
    };
    Ok(ConvergenceStudy { trend, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{Marginal, ProcessModel};

    #[test]
    fn trend_rule() {
        assert!(non_increasing_within_2se(&[3.0, 2.0, 1.0], &[0.0, 0.0, 0.0]));
        assert!(non_increasing_within_2se(&[1.0, 1.1, 1.0], &[0.1, 0.1, 0.1]));
        assert!(!non_increasing_within_2se(&[1.0, 2.0, 0.5], &[0.1, 0.1, 0.1]));
    }

    #[test]
    fn requires_valid_grid() {
        let mut config = ExperimentConfig::new(ProcessModel::iid(Marginal::Uniform), 100, 1.0, 10, 0);
        assert!(convergence_study(&config).is_err());
        config.n_grid = Some(vec![1000, 100, 10_000]);
        assert!(matches!(convergence_study(&config), Err(Error::Config(_))));
    }

    #[test]
    fn iid_distances_are_sampling_noise() {
        let mut config = ExperimentConfig::new(ProcessModel::iid(Marginal::Uniform), 100, 5.0, 2000, 4);
        config.n_grid = Some(vec![100, 300, 1000]);
        let study = convergence_study(&config).unwrap();
        assert_eq!(study.reports.len(), 3);
        for p in &study.trend.points {
            assert!(p.tstar_sup <= 4.0 * p.tstar_sup_se + 1e-12, "{p:?}");
        }
        assert!(study.trend.tstar_sup_non_increasing);
    }
}
