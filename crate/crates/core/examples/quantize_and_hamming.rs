//! Quantize two noisy copies of a segment and compare the keys.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slkd::{hamming_fraction, quantize, QuantizePolicy};

fn main() -> slkd::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let segment: Vec<f64> = (0..4096).map(|_| rng.random_range(-1.0..1.0)).collect();

    let reference = quantize(&segment, segment.len(), QuantizePolicy::Median)?;
    println!("key: {} bits, {} ones, prefix {}", reference.len(), reference.count_ones(), &reference.to_hex()[..16]);

    for noise in [0.0, 0.05, 0.2, 0.5] {
        let noisy: Vec<f64> = segment.iter().map(|v| 0.9 * v + noise * rng.random_range(-1.0..1.0)).collect();
        for policy in [QuantizePolicy::Median, QuantizePolicy::Mean, QuantizePolicy::Fixed(0.0)] {
            let key = quantize(&noisy, noisy.len(), policy)?;
            println!("noise {noise:.2} {policy:?}: hamming {:.4}", hamming_fraction(&reference, &key)?);
        }
    }
    Ok(())
}
