//! Adaptive synchronization on calibrated simulated captures.

use slkd::harness::{extract_keys, Algorithm, TrialOptions};
use slkd::simulator::{gen_driving, make_pair, ChannelPreset, DrivingKind};
use slkd::{adaptive_sync, Matcher, SyncParams};

fn main() -> slkd::Result<()> {
    let params = SyncParams::default();
    for (seed, kind) in DrivingKind::ALL.into_iter().enumerate() {
        let seed = seed as u64 + 1;
        let driving = gen_driving(kind, 2 * params.frame_len(), params.frame_len(), seed)?;
        let pair = make_pair(&driving, &ChannelPreset::PaperCalibrated.channel(seed), &params)?;

        let sync = adaptive_sync(&pair.sender, &pair.receiver, &params, Matcher::Fft)?;
        let found = sync.receiver_key_start as i64 - sync.sender_key_start as i64;
        let keys = extract_keys(&pair.sender, &pair.receiver, Algorithm::Adaptive, &params, TrialOptions::default())?;
        println!(
            "{kind}: sync origin {}, offset found {found} (true {}), distance {:.2}, key hamming {:.4}",
            sync.sync.origin(),
            pair.truth_offset,
            sync.result.score,
            keys.hamming()?
        );
    }
    Ok(())
}
