//! First hitting times of threshold exceedances in stationary sequences.
//!
//! The crate simulates stationary processes whose extremal index θ is known
//! in closed form, extracts exceedance statistics from sample paths, and
//! compares them with the asymptotic hitting-time laws:
//!
//! ```text
//! P{T_1 = j}  ~ ρ (1 - ρ)^{(j-1)θ}          inter-exceedance gap
//! P{T*  = j}  ~ (ρ/θ) (1 - θρ)^{j-1}         first hitting time
//! P{T* = n+1} = ρ · P{T_1 > n}               exact renewal identity
//! ```
//!
//! Modules map onto the layers of the toolkit:
//!
//! - [`process`]: ARMAX, moving-maxima and i.i.d. simulators
//! - [`exceedance`]: thresholds, hitting times, gaps, empirical mass functions
//! - [`laws`]: closed-form asymptotic laws and the exact T_1 ↔ T* identities
//! - [`estimators`]: intervals, blocks and runs estimators of θ
//! - [`harness`]: replicated experiments, convergence studies, report output

pub mod error;
pub mod estimators;
pub mod exceedance;
pub mod harness;
pub mod laws;
pub mod process;

pub use error::{Error, Result};
pub use estimators::{blocks_estimator, intervals_estimator, runs_estimator, EstimatorMethod, ThetaEstimate};
pub use exceedance::{
    empirical_pmf, make_threshold, make_threshold_with_rho, summarize_exceedances, sup_distance, tv_distance,
    CountHistogram, DiscretePmf, ExceedanceSummary, ThresholdMethod, ThresholdSpec,
};
pub use harness::{
    convergence_study, emit_convergence, emit_report, run_experiment, ConvergenceStudy, ExperimentConfig,
    ExperimentReport, ReportFormat,
};
pub use laws::{LawParams, NormalizationPair};
pub use process::{simulate, Marginal, ProcessKind, ProcessModel, SamplePath};
