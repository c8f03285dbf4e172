//! Command-line entry point.
//!
//! Exit codes: 0 on success, 1 on configuration errors, 2 on runtime errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hitting_core::harness::{convergence_study_with, emit_convergence, emit_report, run_experiment_with, RunOptions};
use hitting_core::{Error, ExperimentConfig, ReportFormat};

#[derive(Parser)]
#[command(
    name = "hitting",
    version,
    about = "Monte Carlo validation of hitting-time laws for threshold exceedances"
)]
struct Cli {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "both", value_parser = parse_format)]
    format: ReportFormat,
    /// Worker threads (does not change results).
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn run(cli: Cli) -> Result<(), Error> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", cli.config.display())))?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = cli.out {
        config.output_dir = out;
    }
    let options = RunOptions { threads: cli.threads };
    let dir = config.output_dir.clone();

    if config.n_grid.is_some() {
        let study = convergence_study_with(&config, &options)?;
        for report in &study.reports {
            report
                .warnings
                .iter()
                .for_each(|w| eprintln!("warning (n = {}): {w}", report.n));
        }
        let written = emit_convergence(&study, &dir, cli.format)?;
        for p in &study.trend.points {
            println!(
                "n={} sup(T*)={:.3e}±{:.1e} sup(T1)={:.3e} rho_hat*mean(T*)={:.4}",
                p.n, p.tstar_sup, p.tstar_sup_se, p.t1_sup, p.rho_hat_times_conditional_mean.value
            );
        }
        println!(
            "T* distance non-increasing within 2 SE: {}",
            study.trend.tstar_sup_non_increasing
        );
        println!("wrote {} files under {}", written.len(), dir.display());
    } else {
        let report = run_experiment_with(&config, &options)?;
        report.warnings.iter().for_each(|w| eprintln!("warning: {w}"));
        let written = emit_report(&report, &dir, cli.format)?;
        let sm = &report.scaled_mean;
        println!(
            "theta={} rho={:.3e} rho_hat={:.3e} censored={}/{} rho_hat*mean(T*)={:.4} [limits 1/theta^3={}, tau/theta={}]",
            report.theta_true,
            report.rho,
            report.rho_hat.value,
            report.censored_count(),
            report.replications,
            sm.rho_hat_times_conditional_mean.value,
            sm.limits.inverse_theta_cubed,
            sm.limits.tau_over_theta
        );
        println!("wrote {} files under {}", written.len(), dir.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 1 } else { 2 })
        }
    }
}
