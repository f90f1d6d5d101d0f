//! A 3% stretch of the leading region defeats peak search while
//! adaptive synchronization keeps working.

use slkd::harness::{derive_seed, extract_keys, Algorithm, TrialOptions};
use slkd::simulator::{gen_driving, make_pair, ChannelPreset, DrivingKind};
use slkd::SyncParams;

fn main() -> slkd::Result<()> {
    let params = SyncParams::default();
    let options = TrialOptions::default();
    for t in 0..6u64 {
        let kind = DrivingKind::ALL[t as usize % 3];
        let driving = gen_driving(kind, 2 * params.frame_len(), params.frame_len(), derive_seed(9, &[t, 1]))?;
        let pair = make_pair(&driving, &ChannelPreset::StretchAnomaly.channel(derive_seed(9, &[t, 2])), &params)?;
        let h = |alg| extract_keys(&pair.sender, &pair.receiver, alg, &params, options).and_then(|k| k.hamming());
        println!(
            "{kind:<23} peak search {:.4}  adaptive {:.4}",
            h(Algorithm::PeakSearch).unwrap_or(1.0),
            h(Algorithm::Adaptive).unwrap_or(1.0)
        );
    }
    Ok(())
}
