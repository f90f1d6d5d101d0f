//! Command-line front end: simulate captures, align waveform files, extract
//! and compare keys, and run or re-render experiments.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use slkd::adaptsync::{adaptive_sync, Matcher};
use slkd::harness::{extract_keys, run_experiment, Algorithm, ExperimentConfig, TrialOptions};
use slkd::io::{self, KeyFormat, WaveFormat};
use slkd::peaksearch::{peak_align, peak_key_start};
use slkd::report::{self, ReportFormat};
use slkd::simulator::{gen_driving, make_pair, ChannelPreset, DrivingKind};
use slkd::{hamming_fraction, QuantizePolicy, SyncError, SyncParams};

#[derive(Parser)]
#[command(name = "slkd", version, about = "Chaotic waveform synchronization for key extraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct ParamArgs {
    /// TOML file with any of the parameter fields below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    align_threshold: Option<f64>,
    #[arg(long)]
    align_window: Option<usize>,
    #[arg(long)]
    sync_margin: Option<f64>,
    #[arg(long)]
    sync_len: Option<usize>,
    #[arg(long)]
    key_len: Option<usize>,
    #[arg(long)]
    success_threshold: Option<f64>,
}

impl ParamArgs {
    fn resolve(&self) -> slkd::Result<SyncParams> {
        let mut p = match &self.config {
            Some(path) => toml::from_str(&fs::read_to_string(path)?)
                .map_err(|e| SyncError::Format(format!("{}: {e}", path.display())))?,
            None => SyncParams::default(),
        };
        if let Some(v) = self.align_threshold {
            p.align_threshold = v;
        }
        if let Some(v) = self.align_window {
            p.align_window = v;
        }
        if let Some(v) = self.sync_margin {
            p.sync_margin = v;
        }
        if let Some(v) = self.sync_len {
            p.sync_len = v;
        }
        if let Some(v) = self.key_len {
            p.key_len = v;
        }
        if let Some(v) = self.success_threshold {
            p.success_threshold = v;
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlignChoice {
    PeakSearch,
    Adaptive,
    AdaptiveNaive,
}

impl AlignChoice {
    fn algorithm(self) -> Algorithm {
        match self {
            Self::PeakSearch => Algorithm::PeakSearch,
            Self::Adaptive | Self::AdaptiveNaive => Algorithm::Adaptive,
        }
    }

    fn matcher(self) -> Matcher {
        match self {
            Self::AdaptiveNaive => Matcher::Naive,
            _ => Matcher::Fft,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WaveChoice {
    Csv,
    Bin,
}

#[derive(Clone, Copy, ValueEnum)]
enum KeyChoice {
    Raw,
    Hex,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportChoice {
    Table,
    Csv,
    Json,
}

impl From<ReportChoice> for ReportFormat {
    fn from(c: ReportChoice) -> Self {
        match c {
            ReportChoice::Table => ReportFormat::Table,
            ReportChoice::Csv => ReportFormat::Csv,
            ReportChoice::Json => ReportFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a sender/receiver capture pair and write both waveforms.
    Simulate {
        #[arg(long, default_value = "pseudo-random")]
        kind: DrivingKind,
        #[arg(long = "channel-preset", default_value = "paper-calibrated")]
        preset: ChannelPreset,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the preset's receiver delay.
        #[arg(long)]
        offset: Option<usize>,
        /// Capture length; defaults to twice sync plus key.
        #[arg(long)]
        capture_len: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: WaveChoice,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Align two waveform files and print key start positions.
    Align {
        sender: PathBuf,
        receiver: PathBuf,
        #[arg(long, value_enum, default_value = "adaptive")]
        algorithm: AlignChoice,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Align two waveform files and write both extracted keys.
    ExtractKey {
        sender: PathBuf,
        receiver: PathBuf,
        #[arg(long, value_enum, default_value = "adaptive")]
        algorithm: AlignChoice,
        #[arg(long)]
        sender_out: PathBuf,
        #[arg(long)]
        receiver_out: PathBuf,
        #[arg(long, value_enum, default_value = "raw")]
        format: KeyChoice,
        /// median, mean or fixed:<threshold>
        #[arg(long, default_value = "median")]
        policy: QuantizePolicy,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Print the Hamming fraction between two key files.
    Hamming { a: PathBuf, b: PathBuf },
    /// Run the cross-paired experiment and write a report.
    Experiment {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 30)]
        n_per_side: usize,
        #[arg(long, value_delimiter = ',', default_value = "periodic,periodic-superposition,pseudo-random")]
        kinds: Vec<DrivingKind>,
        #[arg(long, value_delimiter = ',', default_value = "adaptive,peak-search")]
        algorithms: Vec<Algorithm>,
        #[arg(long = "channel-preset", default_value = "paper-calibrated")]
        preset: ChannelPreset,
        #[arg(long, default_value = "median")]
        policy: QuantizePolicy,
        #[arg(long, default_value = "fft")]
        matcher: Matcher,
        /// Report file; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: ReportChoice,
        /// Include per-trial grids (table) or rows (csv).
        #[arg(long)]
        trials: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Re-render a stored JSON report.
    Report {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: ReportChoice,
        #[arg(long)]
        trials: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> slkd::Result<()> {
    match command {
        Command::Simulate { kind, preset, seed, offset, capture_len, format, out_dir, params } => {
            let params = params.resolve()?;
            let len = capture_len.unwrap_or(2 * params.frame_len());
            let drive = gen_driving(kind, len, params.frame_len(), seed)?;
            let mut channel = preset.channel(seed);
            if let Some(o) = offset {
                channel.offset = o;
            }
            let pair = make_pair(&drive, &channel, &params)?;
            let format = match format {
                WaveChoice::Csv => WaveFormat::Csv,
                WaveChoice::Bin => WaveFormat::Binary,
            };
            fs::create_dir_all(&out_dir)?;
            let ext = format.extension();
            io::write_waveform(&out_dir.join(format!("sender.{ext}")), &pair.sender, format)?;
            io::write_waveform(&out_dir.join(format!("receiver.{ext}")), &pair.receiver, format)?;
            let meta = json!({
                "driving_kind": kind,
                "channel_preset": preset,
                "seed": seed,
                "channel": channel,
                "capture_len": len,
                "lead_in": pair.lead_in,
                "truth_offset": pair.truth_offset,
            });
            write_json(&out_dir.join("pair.json"), &meta)?;
            println!("{}", serde_json::to_string_pretty(&meta).expect("json value"));
        }
        Command::Align { sender, receiver, algorithm, params } => {
            let params = params.resolve()?;
            let s = io::read_waveform(&sender)?;
            let r = io::read_waveform(&receiver)?;
            let out = match algorithm {
                AlignChoice::PeakSearch => {
                    let sp = peak_align(&s, &params)?;
                    let rp = peak_align(&r, &params)?;
                    json!({
                        "algorithm": sp.algorithm,
                        "sender_peak": sp,
                        "receiver_peak": rp,
                        "sender_key_start": peak_key_start(&sp),
                        "receiver_key_start": peak_key_start(&rp),
                    })
                }
                _ => {
                    let a = adaptive_sync(&s, &r, &params, algorithm.matcher())?;
                    json!({
                        "algorithm": a.result.algorithm,
                        "sync_origin": a.sync.origin(),
                        "position": a.result.position,
                        "score": a.result.score,
                        "sender_key_start": a.sender_key_start,
                        "receiver_key_start": a.receiver_key_start,
                    })
                }
            };
            println!("{}", serde_json::to_string_pretty(&out).expect("json value"));
        }
        Command::ExtractKey { sender, receiver, algorithm, sender_out, receiver_out, format, policy, params } => {
            let params = params.resolve()?;
            let s = io::read_waveform(&sender)?;
            let r = io::read_waveform(&receiver)?;
            let options = TrialOptions { policy, matcher: algorithm.matcher() };
            let keys = extract_keys(&s, &r, algorithm.algorithm(), &params, options)?;
            let format = match format {
                KeyChoice::Raw => KeyFormat::Raw,
                KeyChoice::Hex => KeyFormat::Hex,
            };
            io::write_key(&sender_out, &keys.sender, format)?;
            io::write_key(&receiver_out, &keys.receiver, format)?;
            let out = json!({
                "sender_key_start": keys.sender_start,
                "receiver_key_start": keys.receiver_start,
                "bits": keys.sender.len(),
                "hamming": keys.hamming()?,
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("json value"));
        }
        Command::Hamming { a, b } => {
            let h = hamming_fraction(&io::read_key(&a)?, &io::read_key(&b)?)?;
            println!("{h}");
        }
        Command::Experiment {
            seed,
            n_per_side,
            kinds,
            algorithms,
            preset,
            policy,
            matcher,
            out,
            format,
            trials,
            params,
        } => {
            let config = ExperimentConfig {
                kinds,
                algorithms,
                n_per_side,
                preset,
                master_seed: seed,
                params: params.resolve()?,
                options: TrialOptions { policy, matcher },
                ..Default::default()
            };
            let report = run_experiment(&config)?;
            let text = report::render_report(&report, format.into(), trials);
            match out {
                Some(path) => {
                    fs::write(&path, text)?;
                    print!("{}", report::render_report(&report, ReportFormat::Table, false));
                }
                None => print!("{text}"),
            }
        }
        Command::Report { input, format, trials } => {
            let report = report::parse_json(&fs::read_to_string(&input)?)?;
            print!("{}", report::render_report(&report, format.into(), trials));
        }
    }
    Ok(())
}

fn write_json(path: &Path, value: &serde_json::Value) -> slkd::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("json value");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
