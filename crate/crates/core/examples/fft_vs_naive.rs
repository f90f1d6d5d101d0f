//! Time the direct and FFT matchers on a full-size receiver capture.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slkd::{match_fft, match_naive, SyncParams, SyncSequence, Waveform};

fn main() -> slkd::Result<()> {
    let params = SyncParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let wave = Waveform::new((0..2 * params.frame_len()).map(|_| rng.random_range(-1.0..1.0)).collect())?;
    let noisy: Vec<f64> =
        wave[20_000..20_000 + params.sync_len].iter().map(|v| v + 0.1 * rng.random_range(-1.0..1.0)).collect();
    let sync = SyncSequence::from_samples(noisy, 0)?;

    let t = Instant::now();
    let naive = match_naive(&wave, &sync, &params)?;
    let naive_time = t.elapsed();
    let t = Instant::now();
    let fft = match_fft(&wave, &sync, &params)?;
    let fft_time = t.elapsed();

    println!("naive: position {} score {:.6} in {naive_time:?}", naive.position, naive.score);
    println!("fft:   position {} score {:.6} in {fft_time:?}", fft.position, fft.score);
    println!("identical: {}", naive.position == fft.position && naive.score == fft.score);
    Ok(())
}
