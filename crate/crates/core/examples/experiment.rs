//! Run a small cross-paired experiment and print every report format.
//!
//! `cargo run --release --example experiment -- 10` uses 10 captures per side.

use slkd::harness::{run_experiment, ExperimentConfig};
use slkd::report::{render_report, ReportFormat};

fn main() -> slkd::Result<()> {
    let n_per_side = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4);
    let config = ExperimentConfig { n_per_side, master_seed: 1, ..ExperimentConfig::default() };
    let report = run_experiment(&config)?;

    print!("{}", render_report(&report, ReportFormat::Table, false));
    println!();
    print!("{}", render_report(&report, ReportFormat::Csv, false));
    let json = render_report(&report, ReportFormat::Json, false);
    println!("\njson report: {} bytes", json.len());
    Ok(())
}
