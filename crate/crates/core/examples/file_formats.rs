//! Write and read back waveforms and keys in every supported format.

use slkd::io::{read_key, read_waveform, write_key, write_waveform, KeyFormat, WaveFormat};
use slkd::simulator::{gen_driving, make_pair, ChannelModel, DrivingKind};
use slkd::{quantize, QuantizePolicy, SyncParams};

fn main() -> slkd::Result<()> {
    let params = SyncParams::default().with_lengths(256, 1024);
    let driving = gen_driving(DrivingKind::Periodic, 2 * params.frame_len(), params.frame_len(), 1)?;
    let pair = make_pair(&driving, &ChannelModel::identity(2), &params)?;
    let dir = std::env::temp_dir().join("slkd-file-formats");
    std::fs::create_dir_all(&dir)?;

    for format in [WaveFormat::Csv, WaveFormat::Binary] {
        let path = dir.join(format!("sender.{}", format.extension()));
        write_waveform(&path, &pair.sender, format)?;
        let back = read_waveform(&path)?;
        let max_err = pair.sender.iter().zip(back.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("{}: {} bytes, max round-trip error {max_err:.2e}", path.display(), std::fs::metadata(&path)?.len());
    }

    let key = quantize(pair.sender.segment(300, params.key_len)?, params.key_len, QuantizePolicy::Median)?;
    for (format, ext) in [(KeyFormat::Raw, "key"), (KeyFormat::Hex, "hex")] {
        let path = dir.join(format!("sender.{ext}"));
        write_key(&path, &key, format)?;
        println!(
            "{}: {} bytes, round trip exact: {}",
            path.display(),
            std::fs::metadata(&path)?.len(),
            read_key(&path)? == key
        );
    }
    Ok(())
}
