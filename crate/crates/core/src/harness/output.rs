//! CSV and JSON report files.
//!
//! Every floating-point number is rounded to 12 significant digits before it
//! is written, so files are byte-identical for identical inputs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::convergence::ConvergenceStudy;
use super::run::ExperimentReport;
use crate::error::{Error, Result};

pub const TABLE_FILE: &str = "report.csv";
pub const KTH_FILE: &str = "hitting_times_k.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CONVERGENCE_FILE: &str = "convergence.json";
pub const TABLE_HEADER: &str = "j,emp_tstar,emp_t1,eq17,eq2a_raw,eq14_norm,id4_residual,id13_residual";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    #[default]
    Both,
}

impl ReportFormat {
    fn csv(self) -> bool {
        matches!(self, ReportFormat::Csv | ReportFormat::Both)
    }

    fn json(self) -> bool {
        matches!(self, ReportFormat::Json | ReportFormat::Both)
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "both" => Ok(ReportFormat::Both),
            other => Err(Error::Config(format!(
                "unknown format `{other}`; expected csv, json or both"
            ))),
        }
    }
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest text that reads back as the 12-digit rounded value.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round12(x);
    if r == 0.0 {
        "0".into()
    } else if (1e-4..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn round_json(value: &mut Value) {
    match value {
        Value::Number(num) if !(num.is_u64() || num.is_i64()) => {
            if let Some(x) = num.as_f64() {
                *value = serde_json::Number::from_f64(round12(x)).map_or(Value::Null, Value::Number);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::Config(format!("cannot serialize report: {e}")))?;
    round_json(&mut v);
    let mut text =
        serde_json::to_string_pretty(&v).map_err(|e| Error::Config(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn table_csv(report: &ExperimentReport) -> String {
    let mut out = String::with_capacity(64 * (report.table.len() + 1));
    out.push_str(TABLE_HEADER);
    out.push('\n');
    for row in &report.table {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.j,
            format_number(row.emp_tstar),
            format_number(row.emp_t1),
            format_number(row.eq17),
            format_number(row.eq2a_raw),
            format_number(row.eq14_norm),
            format_number(row.id4_residual),
            format_number(row.id13_residual),
        );
    }
    out
}

/// Unconditional pmfs of the k-th hitting times, one column per k.
pub fn kth_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("j");
    for k in 1..=report.kth_pmfs.len() {
        let _ = write!(out, ",k{k}");
    }
    out.push('\n');
    for j in 1..=report.support_max {
        out.push_str(&j.to_string());
        for pmf in &report.kth_pmfs {
            out.push(',');
            out.push_str(&format_number(pmf.get(j)));
        }
        out.push('\n');
    }
    out.push_str("overflow");
    for pmf in &report.kth_pmfs {
        out.push(',');
        out.push_str(&format_number(pmf.tail_mass()));
    }
    out.push('\n');
    out
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes the report files into `dir` and returns their paths.
pub fn emit_report(report: &ExperimentReport, dir: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    if format.csv() {
        written.push(write_file(dir.join(TABLE_FILE), &table_csv(report))?);
        written.push(write_file(dir.join(KTH_FILE), &kth_csv(report))?);
    }
    if format.json() {
        written.push(write_file(dir.join(SUMMARY_FILE), &to_json_string(report)?)?);
    }
    Ok(written)
}

/// One subdirectory `n_<n>` per grid point plus the trend summary.
pub fn emit_convergence(study: &ConvergenceStudy, dir: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    for report in &study.reports {
        written.extend(emit_report(report, &dir.join(format!("n_{}", report.n)), format)?);
    }
    if format.json() {
        written.push(write_file(dir.join(CONVERGENCE_FILE), &to_json_string(study)?)?);
    }
    Ok(written)
}
