//! Adaptive time synchronization.
//!
//! The sender cuts `L` samples at its waveform start and shares them. The
//! receiver slides that sequence over its own capture and takes the offset of
//! least squared Euclidean distance. The sender's key starts right after its
//! sync sequence; the receiver's key starts `L` samples after the match.
//!
//! Two matchers are provided. [`match_naive`] evaluates every candidate
//! directly. [`match_fft`] expands `sum (w - s)^2` into window energy (prefix
//! sums), a cross-correlation (real FFT) and the sync energy, then re-scores
//! every near-minimal candidate with the direct sum so that both matchers
//! return the same position and the same score.

use std::cell::RefCell;

use realfft::num_complex::Complex;
use realfft::RealFftPlanner;
use serde::{Deserialize, Serialize};

use crate::distance::sq_distance;
use crate::error::{Result, SyncError};
use crate::params::SyncParams;
use crate::peaksearch::find_waveform_start;
use crate::waveform::{AlignAlgorithm, AlignmentResult, SyncSequence, Waveform};

/// Relative slack used to collect candidates from the FFT score estimate.
/// Double-precision FFT error is many orders of magnitude below this.
const FFT_CANDIDATE_SLACK: f64 = 1e-8;

/// Matcher used by [`adaptive_sync`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Matcher {
    Naive,
    #[default]
    Fft,
}

impl std::str::FromStr for Matcher {
    type Err = SyncError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Self::Naive),
            "fft" => Ok(Self::Fft),
            other => Err(SyncError::Parameter(format!("unknown matcher '{other}'"))),
        }
    }
}

impl Matcher {
    pub fn algorithm(self) -> AlignAlgorithm {
        match self {
            Self::Naive => AlignAlgorithm::AdaptiveNaive,
            Self::Fft => AlignAlgorithm::AdaptiveFft,
        }
    }
}

/// Cuts the sender's sync sequence at the located waveform start.
pub fn select_sync_sequence(sender: &Waveform, params: &SyncParams) -> Result<SyncSequence> {
    let origin = find_waveform_start(sender, params)?.position;
    let needed = origin + params.frame_len();
    if needed > sender.len() {
        return Err(SyncError::Length(format!(
            "sender has {} samples, sync at {origin} plus key needs {needed}",
            sender.len()
        )));
    }
    SyncSequence::cut(sender, origin, params.sync_len)
}

/// Exclusive upper bound of candidate positions: every candidate leaves room
/// for the sync sequence and a full key.
fn candidate_count(receiver: &Waveform, sync: &SyncSequence, params: &SyncParams) -> Result<usize> {
    if sync.len() != params.sync_len {
        return Err(SyncError::Length(format!(
            "sync sequence has {} samples, sync_len is {}",
            sync.len(),
            params.sync_len
        )));
    }
    let frame = params.frame_len();
    if receiver.len() < frame {
        return Err(SyncError::Length(format!("receiver has {} samples, sync plus key needs {frame}", receiver.len())));
    }
    Ok(receiver.len() - frame + 1)
}

/// Exhaustive scan; ties resolve to the smallest index.
pub fn match_naive(receiver: &Waveform, sync: &SyncSequence, params: &SyncParams) -> Result<AlignmentResult> {
    let count = candidate_count(receiver, sync, params)?;
    let len = sync.len();
    let mut best = (0, f64::INFINITY);
    for i in 0..count {
        let d = sq_distance(&receiver[i..i + len], sync.samples());
        if d < best.1 {
            best = (i, d);
        }
    }
    Ok(AlignmentResult { position: best.0, score: best.1, algorithm: AlignAlgorithm::AdaptiveNaive })
}

/// FFT-accelerated equivalent of [`match_naive`].
pub fn match_fft(receiver: &Waveform, sync: &SyncSequence, params: &SyncParams) -> Result<AlignmentResult> {
    let count = candidate_count(receiver, sync, params)?;
    let len = sync.len();
    let searched = &receiver[..count + len - 1];

    let correlation = cross_correlate(searched, sync.samples(), count);

    let mut prefix = Vec::with_capacity(searched.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for s in searched {
        acc += s * s;
        prefix.push(acc);
    }
    let sync_energy: f64 = sync.samples().iter().map(|s| s * s).sum();

    let mut estimates = Vec::with_capacity(count);
    let mut max_window = 0.0f64;
    for (i, c) in correlation.iter().enumerate() {
        let window = prefix[i + len] - prefix[i];
        max_window = max_window.max(window);
        estimates.push(window - 2.0 * c + sync_energy);
    }
    let lowest = estimates.iter().copied().fold(f64::INFINITY, f64::min);
    // Prefix-sum cancellation grows with the running total, so the slack scales
    // with the whole searched energy as well as the largest window.
    let slack = FFT_CANDIDATE_SLACK * (max_window + sync_energy + prefix[searched.len()]) + f64::MIN_POSITIVE;

    let mut best = (0, f64::INFINITY);
    for (i, &e) in estimates.iter().enumerate() {
        if e <= lowest + slack {
            let d = sq_distance(&receiver[i..i + len], sync.samples());
            if d < best.1 {
                best = (i, d);
            }
        }
    }
    Ok(AlignmentResult { position: best.0, score: best.1, algorithm: AlignAlgorithm::AdaptiveFft })
}

thread_local! {
    static PLANNER: RefCell<RealFftPlanner<f64>> = RefCell::new(RealFftPlanner::new());
}

/// `out[i] = sum_j signal[i + j] * kernel[j]` for `i < count`, by overlap-save
/// over blocks a few times longer than the kernel.
fn cross_correlate(signal: &[f64], kernel: &[f64], count: usize) -> Vec<f64> {
    let m = kernel.len();
    // Each block of n inputs yields n - m + 1 outputs without wrap-around.
    let n = (4 * m).next_power_of_two().min(signal.len().next_power_of_two()).max(2);
    let step = n - m + 1;
    let (forward, inverse) = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    });

    let mut ker_in = forward.make_input_vec();
    ker_in[..m].copy_from_slice(kernel);
    let mut ker_spec = forward.make_output_vec();
    forward.process(&mut ker_in, &mut ker_spec).expect("buffers sized by planner");

    let mut block = forward.make_input_vec();
    let mut spectrum = forward.make_output_vec();
    let mut back = inverse.make_output_vec();
    let last = spectrum.len() - 1;
    let scale = 1.0 / n as f64;
    let mut out = Vec::with_capacity(count);
    let mut start = 0;
    while start < count {
        let end = (start + n).min(signal.len());
        block[..end - start].copy_from_slice(&signal[start..end]);
        block[end - start..].fill(0.0);
        forward.process(&mut block, &mut spectrum).expect("buffers sized by planner");
        for (a, b) in spectrum.iter_mut().zip(&ker_spec) {
            *a *= b.conj();
        }
        // DC and Nyquist bins are real for real inputs; clear round-off.
        spectrum[0] = Complex::new(spectrum[0].re, 0.0);
        spectrum[last] = Complex::new(spectrum[last].re, 0.0);
        inverse.process(&mut spectrum, &mut back).expect("buffers sized by planner");
        let take = step.min(count - start);
        out.extend(back[..take].iter().map(|v| v * scale));
        start += step;
    }
    out
}

/// Key start positions agreed by adaptive synchronization.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveSync {
    pub sync: SyncSequence,
    pub sender_key_start: usize,
    pub receiver_key_start: usize,
    pub result: AlignmentResult,
}

/// Runs the full sender/receiver procedure with the chosen matcher.
pub fn adaptive_sync(
    sender: &Waveform,
    receiver: &Waveform,
    params: &SyncParams,
    matcher: Matcher,
) -> Result<AdaptiveSync> {
    let sync = select_sync_sequence(sender, params)?;
    let result = match matcher {
        Matcher::Naive => match_naive(receiver, &sync, params)?,
        Matcher::Fft => match_fft(receiver, &sync, params)?,
    };
    Ok(AdaptiveSync {
        sender_key_start: sync.origin() + params.sync_len,
        receiver_key_start: result.position + params.sync_len,
        sync,
        result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_wave(rng: &mut impl Rng, len: usize) -> Vec<f64> {
        (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    /// Exhaustive oracle over the same candidate range, independent of both matchers.
    fn oracle(wave: &[f64], sync: &[f64], key_len: usize) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        let last = wave.len() - sync.len() - key_len;
        for i in 0..=last {
            let mut d = 0.0;
            for j in 0..sync.len() {
                d += (wave[i + j] - sync[j]).powi(2);
            }
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    fn small_params(l: usize, k: usize) -> SyncParams {
        SyncParams::default().with_lengths(l, k)
    }

    #[test]
    fn exact_prefix_match() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = Waveform::new(random_wave(&mut rng, 400)).unwrap();
        let p = small_params(32, 64);
        let sync = SyncSequence::cut(&w, 0, 32).unwrap();
        for r in [match_naive(&w, &sync, &p).unwrap(), match_fft(&w, &sync, &p).unwrap()] {
            assert_eq!(r.position, 0);
            assert_eq!(r.score, 0.0);
        }
    }

    #[test]
    fn embedded_sync_is_found() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut wave = random_wave(&mut rng, 2000);
        let sync_samples = random_wave(&mut rng, 100);
        wave[137..237].copy_from_slice(&sync_samples);
        let w = Waveform::new(wave.clone()).unwrap();
        let p = small_params(100, 500);
        let sync = SyncSequence::from_samples(sync_samples.clone(), 0).unwrap();
        assert_eq!(oracle(&wave, &sync_samples, 500), (137, 0.0));
        assert_eq!(match_naive(&w, &sync, &p).unwrap().position, 137);
        assert_eq!(match_fft(&w, &sync, &p).unwrap().position, 137);

        // Small additive noise on the embedded copy.
        let mut noisy = wave;
        for v in &mut noisy[137..237] {
            *v += rng.random_range(-0.05..0.05);
        }
        let (pos, score) = oracle(&noisy, &sync_samples, 500);
        assert_eq!(pos, 137);
        let w = Waveform::new(noisy).unwrap();
        let naive = match_naive(&w, &sync, &p).unwrap();
        let fft = match_fft(&w, &sync, &p).unwrap();
        assert_eq!((naive.position, fft.position), (137, 137));
        assert!(naive.score > 0.0);
        assert!((naive.score - score).abs() <= 1e-12 * score);
        assert_eq!(naive.score, fft.score);
    }

    #[test]
    fn duplicate_embedding_resolves_to_smaller_index() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut wave = random_wave(&mut rng, 3000);
        let sync_samples = random_wave(&mut rng, 64);
        wave[100..164].copy_from_slice(&sync_samples);
        wave[400..464].copy_from_slice(&sync_samples);
        let w = Waveform::new(wave).unwrap();
        let sync = SyncSequence::from_samples(sync_samples, 0).unwrap();
        let p = small_params(64, 1000);
        assert_eq!(match_naive(&w, &sync, &p).unwrap().position, 100);
        assert_eq!(match_fft(&w, &sync, &p).unwrap().position, 100);
    }

    #[test]
    fn matchers_agree_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = small_params(256, 1024);
        for _ in 0..20 {
            let w = Waveform::new(random_wave(&mut rng, 10_000)).unwrap();
            let sync = SyncSequence::from_samples(random_wave(&mut rng, 256), 0).unwrap();
            let naive = match_naive(&w, &sync, &p).unwrap();
            let fft = match_fft(&w, &sync, &p).unwrap();
            assert_eq!(naive.position, fft.position);
            assert_eq!(naive.score, fft.score);
        }
    }

    #[test]
    fn short_receiver_is_a_length_error() {
        let w = Waveform::new(vec![0.5; 95]).unwrap();
        let sync = SyncSequence::from_samples(vec![0.5; 32], 0).unwrap();
        let p = small_params(32, 64);
        assert!(matches!(match_naive(&w, &sync, &p), Err(SyncError::Length(_))));
        assert!(matches!(match_fft(&w, &sync, &p), Err(SyncError::Length(_))));
        let wrong_len = small_params(31, 10);
        assert!(matches!(match_fft(&w, &sync, &wrong_len), Err(SyncError::Length(_))));
    }

    #[test]
    fn sync_selection_follows_waveform_start() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = small_params(1200, 2000);
        let mut samples = vec![0.0; 200];
        samples.extend(random_wave(&mut rng, 4000));
        let w = Waveform::new(samples.clone()).unwrap();
        let sync = select_sync_sequence(&w, &p).unwrap();
        // The first window [0, 100) is already quiescent.
        assert_eq!(sync.origin(), 100);
        assert_eq!(sync.samples(), &samples[100..1300]);

        let active = Waveform::new(random_wave(&mut rng, 4000).iter().map(|v| v + 2.0).collect()).unwrap();
        let sync = select_sync_sequence(&active, &p).unwrap();
        assert_eq!(sync.origin(), 0);
        assert_eq!(sync.samples(), &active[..1200]);

        let short = Waveform::new(vec![0.0; 1000]).unwrap();
        assert!(matches!(select_sync_sequence(&short, &p), Err(SyncError::Length(_))));
    }

    #[test]
    fn adaptive_sync_on_identical_and_shifted_copies() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = small_params(300, 2000);
        let mut sender = vec![0.0; 250];
        sender.extend(random_wave(&mut rng, 6000));
        let s = Waveform::new(sender.clone()).unwrap();
        let same = adaptive_sync(&s, &s, &p, Matcher::Fft).unwrap();
        assert_eq!(same.sender_key_start, same.receiver_key_start);
        assert_eq!(same.sender_key_start, 100 + 300);

        let shift = 977;
        let mut shifted = sender.clone();
        shifted.rotate_right(shift);
        let r = Waveform::new(shifted).unwrap();
        for m in [Matcher::Naive, Matcher::Fft] {
            let out = adaptive_sync(&s, &r, &p, m).unwrap();
            assert_eq!(out.receiver_key_start - out.sender_key_start, shift);
            assert_eq!(out.result.algorithm, m.algorithm());
            assert_eq!(
                &s[out.sender_key_start..out.sender_key_start + 2000],
                &r[out.receiver_key_start..out.receiver_key_start + 2000]
            );
        }
    }
}
