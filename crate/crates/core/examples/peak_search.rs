//! Peak-search alignment on a clean capture and on a shifted copy.

use slkd::simulator::{gen_driving, make_pair, ChannelModel, DrivingKind};
use slkd::{find_first_peak, find_waveform_start, peak_align, SyncParams, Waveform};

fn main() -> slkd::Result<()> {
    let params = SyncParams::default();
    let driving = gen_driving(DrivingKind::PseudoRandom, 2 * params.frame_len(), params.frame_len(), 3)?;
    let pair = make_pair(&driving, &ChannelModel::identity(4), &params)?;
    let sender = &pair.sender;

    let start = find_waveform_start(sender, &params)?;
    let peak = find_first_peak(sender, start.position, &params)?;
    println!(
        "lead-in {} samples; start {} (quiescent {}); first peak at {}",
        pair.lead_in, start.position, start.quiescent, peak.position
    );

    for shift in [5, 250, 1000] {
        let mut samples = vec![0.0; shift];
        samples.extend_from_slice(sender.samples());
        let shifted = Waveform::new(samples)?;
        let found = peak_align(&shifted, &params)?;
        println!(
            "prepended {shift:>4} quiet samples: peak at {} (moved {})",
            found.position,
            found.position - peak.position
        );
    }
    Ok(())
}
