//! Sweeps the receiver noise level and reports the mean Hamming distance of
//! adaptive synchronization and the peak-search failure rate at full key
//! length. The `paper-calibrated` preset's noise level was read off this
//! sweep as the value putting adaptive mean Hamming in the 5-6% band.
//!
//! ```bash
//! cargo run --release -p slkd --example calibrate_noise
//! ```

use rayon::prelude::*;
use slkd::harness::{derive_seed, run_trial, Algorithm};
use slkd::simulator::{gen_driving, make_pair, ChannelPreset, DrivingKind};
use slkd::SyncParams;

fn main() -> slkd::Result<()> {
    let params = SyncParams::default();
    let trials = 24u64;
    println!("{:>7} {:>15} {:>13} {:>13}", "sigma", "kind", "adaptive mean", "peak failures");
    for sigma in [0.05, 0.10, 0.15, 0.20, 0.22, 0.23, 0.24, 0.26] {
        for kind in DrivingKind::ALL {
            let drive = gen_driving(kind, 2 * params.frame_len(), params.frame_len(), 11)?;
            let rows: Vec<(f64, bool)> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut channel = ChannelPreset::PaperCalibrated.channel(derive_seed(99, &[t]));
                    channel.noise_sigma = sigma;
                    let pair = make_pair(&drive, &channel, &params).expect("valid pair");
                    let adaptive = run_trial(&pair, Algorithm::Adaptive, &params);
                    let peak = run_trial(&pair, Algorithm::PeakSearch, &params);
                    (adaptive.hamming, !peak.success)
                })
                .collect();
            let mean = rows.iter().map(|r| r.0).sum::<f64>() / trials as f64;
            let peak_fail = rows.iter().filter(|r| r.1).count();
            println!("{sigma:>7.3} {:>15} {:>12.2}% {:>10}/{trials}", kind.name(), mean * 100.0, peak_fail);
        }
    }
    Ok(())
}
