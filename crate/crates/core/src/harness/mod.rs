//! Experiment orchestration: configs, replicated runs, convergence studies
//! and report files.

mod config;
mod convergence;
mod output;
mod run;

pub use config::ExperimentConfig;
pub use convergence::{
    convergence_study, convergence_study_with, non_increasing_within_2se, ConvergenceStudy, TrendPoint, TrendSummary,
};
pub use output::{
    emit_convergence, emit_report, format_number, kth_csv, round12, table_csv, to_json_string, ReportFormat,
    CONVERGENCE_FILE, KTH_FILE, SUMMARY_FILE, TABLE_FILE, TABLE_HEADER,
};
pub use run::{
    default_support_max, run_experiment, run_experiment_with, DistancePair, Distances, EstimatorSummary,
    ExperimentReport, HittingTimeSummary, IdentityCheck, Interval, LimitAtNCheck, RunOptions, ScaledMeanComparison,
    TableRow, ValueSe, IDENTITY_CHECK_MAX,
};
