//! Generate driving sequences, device responses and capture pairs.

use slkd::simulator::{gen_chaotic_response, gen_driving, make_pair, ChannelPreset, DrivingKind};
use slkd::SyncParams;

fn stats(xs: &[f64]) -> (f64, f64) {
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let rms = (xs.iter().map(|v| v * v).sum::<f64>() / xs.len() as f64).sqrt();
    (mean, rms)
}

fn main() -> slkd::Result<()> {
    let params = SyncParams::default();
    for kind in DrivingKind::ALL {
        let driving = gen_driving(kind, 2 * params.frame_len(), params.frame_len(), 17)?;
        let response = gen_chaotic_response(&driving, 18)?;
        let (mean, rms) = stats(response.samples());
        println!("{kind}: period {:?}, response mean {mean:.3} rms {rms:.3}", driving.period);

        for preset in [ChannelPreset::Clean, ChannelPreset::PaperCalibrated, ChannelPreset::StretchAnomaly] {
            let pair = make_pair(&driving, &preset.channel(19), &params)?;
            println!(
                "  {preset}: lead-in {}, true offset {}, receiver rms {:.3}",
                pair.lead_in,
                pair.truth_offset,
                stats(pair.receiver.samples()).1
            );
        }
    }
    Ok(())
}
