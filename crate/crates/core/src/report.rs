//! Text renderings of an [`ExperimentReport`].
//!
//! The table layout puts driving kinds in rows and algorithms in columns,
//! with failure rates to two decimals. Per-trial grids (senders in rows,
//! receivers in columns) use four decimals.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Result, SyncError};
use crate::harness::{CellReport, ExperimentReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = SyncError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Self::Table),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(SyncError::Parameter(format!("unknown report format '{other}'"))),
        }
    }
}

/// Columns of the summary CSV, in order.
pub const CSV_SUMMARY_HEADER: &str =
    "driving_kind,algorithm,trials,successes,failures,hard_failures,failure_rate,mean_hamming,median_hamming,max_hamming";
/// Columns of the per-trial CSV, in order.
pub const CSV_TRIALS_HEADER: &str =
    "driving_kind,algorithm,sender_trial_id,receiver_trial_id,hamming,success,hard_failure";

/// Renders the summary; `trials` adds per-trial grids (table) or switches the
/// CSV to one row per trial. JSON always carries every outcome.
pub fn render_report(report: &ExperimentReport, format: ReportFormat, trials: bool) -> String {
    match format {
        ReportFormat::Table => render_table(report, trials),
        ReportFormat::Csv if trials => render_trials_csv(report),
        ReportFormat::Csv => render_summary_csv(report),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report is always serializable");
            s.push('\n');
            s
        }
    }
}

pub fn parse_json(text: &str) -> Result<ExperimentReport> {
    serde_json::from_str(text).map_err(|e| SyncError::Format(format!("report json: {e}")))
}

/// `0.0578` renders as `5.78%`.
pub fn percent2(fraction: f64) -> String {
    format!("{:.2}%", fraction * 100.0)
}

/// `0.285119` renders as `28.5119%`.
pub fn percent4(fraction: f64) -> String {
    format!("{:.4}%", fraction * 100.0)
}

fn grid(title: &str, report: &ExperimentReport, cell: impl Fn(&CellReport) -> String) -> String {
    let algorithms = report.algorithms();
    let mut rows = vec![std::iter::once("Driving sequence".to_string())
        .chain(algorithms.iter().map(|a| a.title().to_string()))
        .collect::<Vec<_>>()];
    for kind in report.kinds() {
        let mut row = vec![kind.name().to_string()];
        for &alg in &algorithms {
            row.push(report.cell(kind, alg).map(&cell).unwrap_or_else(|| "-".into()));
        }
        rows.push(row);
    }
    let mut out = format!("{title}\n");
    out.push_str(&align_columns(&rows));
    out
}

fn align_columns(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().enumerate().map(|(c, v)| format!("{v:<w$}", w = widths[c])).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn render_table(report: &ExperimentReport, trials: bool) -> String {
    let threshold = report.config.params.success_threshold;
    let mut out =
        grid(&format!("Failure rate (Hamming >= {})", percent2(threshold)), report, |c| percent2(c.failure_rate));
    if report.cells.is_empty() {
        return out;
    }
    out.push('\n');
    out.push_str(&grid("Mean Hamming distance", report, |c| percent2(c.mean_hamming)));
    out.push('\n');
    out.push_str(&grid("Hard failures / trials", report, |c| format!("{}/{}", c.hard_failures, c.trials)));
    if trials {
        for cell in &report.cells {
            out.push('\n');
            out.push_str(&trial_grid(cell));
        }
    }
    out
}

fn trial_grid(cell: &CellReport) -> String {
    let senders = cell.outcomes.iter().map(|o| o.sender_trial_id).max().unwrap_or(0);
    let receivers = cell.outcomes.iter().map(|o| o.receiver_trial_id).max().unwrap_or(0);
    let mut rows = vec![std::iter::once(String::new()).chain((1..=receivers).map(|r| r.to_string())).collect()];
    for s in 1..=senders {
        let mut row = vec![s.to_string()];
        for r in 1..=receivers {
            let o = cell.outcomes.iter().find(|o| o.sender_trial_id == s && o.receiver_trial_id == r);
            row.push(match o {
                Some(o) if o.hard_failure => "failed".to_string(),
                Some(o) => percent4(o.hamming),
                None => "-".to_string(),
            });
        }
        rows.push(row);
    }
    format!("{} / {}: Hamming distance per trial\n{}", cell.driving_kind, cell.algorithm, align_columns(&rows))
}

fn render_summary_csv(report: &ExperimentReport) -> String {
    let mut out = format!("{CSV_SUMMARY_HEADER}\n");
    for c in &report.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            c.driving_kind,
            c.algorithm,
            c.trials,
            c.successes(),
            c.failures,
            c.hard_failures,
            c.failure_rate,
            c.mean_hamming,
            c.median_hamming,
            c.max_hamming
        );
    }
    out
}

fn render_trials_csv(report: &ExperimentReport) -> String {
    let mut out = format!("{CSV_TRIALS_HEADER}\n");
    for c in &report.cells {
        for o in &c.outcomes {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                o.driving_kind,
                o.algorithm,
                o.sender_trial_id,
                o.receiver_trial_id,
                o.hamming,
                o.success,
                o.hard_failure
            );
        }
    }
    out
}
